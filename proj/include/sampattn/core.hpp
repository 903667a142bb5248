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

// Dense attention primitives and the exact causal reference.
//
// Storage may be float or double; everything computed here accumulates in
// double. Row summation runs sequentially over keys so results are
// reproducible bit for bit.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sampattn/errors.hpp"

namespace sampattn {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using MatrixXf = Matrix<float>;
using VectorXd = Vector<double>;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// One attention head of causal self-attention: q, k, v are all S x d.
template <typename Scalar>
struct AttentionHead {
  Matrix<Scalar> q;
  Matrix<Scalar> k;
  Matrix<Scalar> v;
  Index head_id = 0;

  Index seq_len() const { return q.rows(); }
  Index head_dim() const { return q.cols(); }
};

using Head = AttentionHead<float>;

template <typename Scalar>
void validate(const AttentionHead<Scalar>& head) {
  if (head.q.rows() < 1 || head.q.cols() < 1)
    throw InputError("attention head must have S >= 1 and d >= 1");
  if (head.k.rows() != head.q.rows() || head.v.rows() != head.q.rows())
    throw InputError("q, k and v must share the sequence length S");
  if (head.k.cols() != head.q.cols() || head.v.cols() != head.q.cols())
    throw InputError("q, k and v must share the head dimension d");
  if (!all_finite(head.q) || !all_finite(head.k) || !all_finite(head.v))
    throw InputError("attention head " + std::to_string(head.head_id) +
                     " contains non-finite values");
}

template <typename Scalar>
AttentionHead<Scalar> make_head(Matrix<Scalar> q, Matrix<Scalar> k,
                                Matrix<Scalar> v, Index head_id = 0) {
  AttentionHead<Scalar> head{std::move(q), std::move(k), std::move(v),
                             head_id};
  validate(head);
  return head;
}

/// Multi-head container; all heads share S and d.
struct HeadSet {
  std::vector<Head> heads;
  Index seq_len = 0;
  Index head_dim = 0;
};

void validate(const HeadSet& set);

/// q k^T / sqrt(d), accumulated in double.
template <typename DQ, typename DK>
MatrixXd scaled_scores(const Eigen::MatrixBase<DQ>& q,
                       const Eigen::MatrixBase<DK>& k, Index d) {
  if (d < 1 || q.cols() != d || k.cols() != d)
    throw InputError("scaled_scores: q.cols and k.cols must equal d");
  MatrixXd out = q.template cast<double>() *
                 k.template cast<double>().transpose();
  out /= std::sqrt(static_cast<double>(d));
  return out;
}

/// Causal softmax of one logit row whose global query index is `query`.
/// Entries past `query` are written as exact zeros.
inline void causal_softmax_row(std::span<double> row, Index query) {
  const Index n = static_cast<Index>(row.size());
  const Index last = std::min(query, n - 1);
  double max = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j <= last; ++j) max = std::max(max, row[j]);
  double sum = 0.0;
  for (Index j = 0; j <= last; ++j) {
    row[j] = std::exp(row[j] - max);
    sum += row[j];
  }
  for (Index j = 0; j <= last; ++j) row[j] /= sum;
  for (Index j = last + 1; j < n; ++j) row[j] = 0.0;
}

/// Row softmax with causal masking. Row r attends to keys j <= rows[r].
template <typename Derived>
MatrixXd causal_row_softmax(const Eigen::MatrixBase<Derived>& scores,
                            std::span<const Index> rows) {
  if (static_cast<Index>(rows.size()) != scores.rows())
    throw InputError("causal_row_softmax: one global index per row required");
  MatrixXd p = scores.template cast<double>();
  for (Index r = 0; r < p.rows(); ++r) {
    if (rows[r] < 0 || rows[r] >= p.cols())
      throw InputError("causal_row_softmax: global row index out of range");
    causal_softmax_row(std::span<double>(p.row(r).data(), p.cols()), rows[r]);
  }
  return p;
}

/// Square form: row i is query i.
template <typename Derived>
MatrixXd causal_row_softmax(const Eigen::MatrixBase<Derived>& scores) {
  if (scores.rows() != scores.cols())
    throw InputError(
        "causal_row_softmax: square scores required without row indices");
  std::vector<Index> rows(scores.rows());
  std::iota(rows.begin(), rows.end(), Index{0});
  return causal_row_softmax(scores, std::span<const Index>(rows));
}

/// Visits the causal probability matrix in row panels of `panel_rows`.
/// `fn(first_row, probs)` receives probs for rows [first_row, first_row + n)
/// over key columns [0, first_row + n); the full S x S matrix is never held.
template <typename Scalar, typename Fn>
void for_each_probability_panel(const AttentionHead<Scalar>& head,
                                Index panel_rows, Fn&& fn) {
  const Index s = head.seq_len();
  const Index d = head.head_dim();
  const MatrixXd k = head.k.template cast<double>();
  std::vector<Index> rows;
  for (Index r0 = 0; r0 < s; r0 += panel_rows) {
    const Index n = std::min(panel_rows, s - r0);
    const Index width = r0 + n;
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), r0);
    MatrixXd scores = scaled_scores(head.q.middleRows(r0, n), k.topRows(width), d);
    for (Index r = 0; r < n; ++r)
      causal_softmax_row(std::span<double>(scores.row(r).data(), width),
                         rows[r]);
    fn(r0, std::as_const(scores));
  }
}

inline constexpr Index kOraclePanelRows = 256;

/// Gold oracle: causal_row_softmax(q k^T / sqrt(d)) v in double.
template <typename Scalar>
MatrixXd dense_causal_attention(const AttentionHead<Scalar>& head) {
  validate(head);
  const MatrixXd v = head.v.template cast<double>();
  MatrixXd out(head.seq_len(), head.head_dim());
  for_each_probability_panel(
      head, kOraclePanelRows, [&](Index r0, const MatrixXd& p) {
        out.middleRows(r0, p.rows()).noalias() = p * v.topRows(p.cols());
      });
  return out;
}

}  // namespace sampattn
