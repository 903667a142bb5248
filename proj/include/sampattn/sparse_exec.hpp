// Copyright 2026 The sampattn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Block-sparse causal attention. Masked logits are excluded outright (the
// limit of subtracting an infinitely large constant), and active blocks are
// folded into per-row running max / normalizer / weighted sums, so no S x S
// intermediate is ever allocated.

#include <limits>

#include "sampattn/block_mask.hpp"
#include "sampattn/core.hpp"
#include "sampattn/cra.hpp"

namespace sampattn {

struct FlopReport {
  Index active_blocks = 0;
  Index causal_blocks = 0;
  double block_density = 0.0;
  double flops_sparse = 0.0;
  double flops_dense = 0.0;
  double wall_time_sparse = 0.0;
  double wall_time_dense = 0.0;
};

/// QK^T plus PV for every block pair; boundary blocks are pro-rated by their
/// true row/column counts. Diagonal blocks count as full pairs since the
/// executor computes them whole before masking.
FlopReport flop_accounting(const BlockMask& mask, Index head_dim);

struct SparseResult {
  MatrixXd output;
  FlopReport flops;
  Index touched_blocks = 0;
  // Final streaming-softmax state per row: P[i][j] = exp(s - row_max) / row_sum.
  VectorXd row_max;
  VectorXd row_sum;
};

template <typename Scalar>
SparseResult sparse_attention(const AttentionHead<Scalar>& head,
                              const BlockMask& mask) {
  validate(head);
  const Index s = head.seq_len();
  const Index d = head.head_dim();
  if (mask.seq_len() != s)
    throw InputError("sparse_attention: mask built for a different S");
  for (Index qb = 0; qb < mask.n_qblocks(); ++qb)
    if (mask.row(qb).empty())
      throw InputError("sparse_attention: query block " + std::to_string(qb) +
                       " has no active key blocks");

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const MatrixXd k = head.k.template cast<double>();
  const MatrixXd v = head.v.template cast<double>();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  SparseResult res;
  res.output.resize(s, d);
  res.row_max.resize(s);
  res.row_sum.resize(s);

  MatrixXd q, scores, acc;
  VectorXd m, l, block_max, m_new, corr;
  for (Index qb = 0; qb < mask.n_qblocks(); ++qb) {
    const Index r0 = mask.block_begin(qb), nr = mask.block_size(qb);
    q = head.q.middleRows(r0, nr).template cast<double>() * scale;
    m.setConstant(nr, neg_inf);
    l.setZero(nr);
    acc.setZero(nr, d);
    for (Index kb : mask.row(qb)) {
      const Index c0 = mask.block_begin(kb), nc = mask.block_size(kb);
      scores.noalias() = q * k.middleRows(c0, nc).transpose();
      if (kb == qb)
        for (Index r = 0; r < nr; ++r)
          for (Index c = r + 1; c < nc; ++c) scores(r, c) = neg_inf;
      block_max = scores.rowwise().maxCoeff();
      m_new = m.cwiseMax(block_max);
      corr = (m - m_new).array().exp();
      scores = (scores.colwise() - m_new).array().exp();
      l = l.cwiseProduct(corr) + scores.rowwise().sum();
      acc = corr.asDiagonal() * acc;
      acc.noalias() += scores * v.middleRows(c0, nc);
      m = m_new;
      ++res.touched_blocks;
    }
    res.output.middleRows(r0, nr) = (acc.array().colwise() / l.array()).matrix();
    res.row_max.segment(r0, nr) = m;
    res.row_sum.segment(r0, nr) = l;
  }
  res.flops = flop_accounting(mask, d);
  return res;
}

/// Masked dense oracle: softmax over active causal entries only, in double,
/// with the full probability matrix materialized.
template <typename Scalar>
MatrixXd masked_dense_attention(const AttentionHead<Scalar>& head,
                                const EntryMask& mask) {
  validate(head);
  const Index s = head.seq_len();
  if (mask.rows() != s || mask.cols() != s)
    throw InputError("masked_dense_attention: mask shape mismatch");
  MatrixXd scores = scaled_scores(head.q, head.k, head.head_dim());
  for (Index i = 0; i < s; ++i) {
    double max = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j <= i; ++j)
      if (mask(i, j)) max = std::max(max, scores(i, j));
    if (max == -std::numeric_limits<double>::infinity())
      throw InputError("masked_dense_attention: row " + std::to_string(i) +
                       " has empty support");
    double sum = 0.0;
    for (Index j = 0; j < s; ++j) {
      scores(i, j) = (j <= i && mask(i, j)) ? std::exp(scores(i, j) - max) : 0.0;
      sum += scores(i, j);
    }
    scores.row(i) /= sum;
  }
  return scores * head.v.template cast<double>();
}

template <typename Scalar>
MatrixXd masked_dense_attention(const AttentionHead<Scalar>& head,
                                const BlockMask& mask) {
  return masked_dense_attention(head, EntryMask::from_blocks(mask));
}

}  // namespace sampattn
