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

#include "sampattn/cra.hpp"

#include <algorithm>
#include <functional>

namespace sampattn {

EntryMask::EntryMask(Index rows, Index cols)
    : rows_(rows), cols_(cols), bits_(static_cast<std::size_t>(rows * cols), 0) {
  if (rows < 0 || cols < 0) throw InputError("EntryMask: negative dimensions");
}

EntryMask EntryMask::full_causal(Index s) {
  EntryMask m(s, s);
  for (Index i = 0; i < s; ++i)
    for (Index j = 0; j <= i; ++j) m.set(i, j);
  return m;
}

EntryMask EntryMask::from_blocks(const BlockMask& mask) {
  const Index s = mask.seq_len();
  EntryMask m(s, s);
  for (Index qb = 0; qb < mask.n_qblocks(); ++qb) {
    const Index r0 = mask.block_begin(qb), nr = mask.block_size(qb);
    for (Index kb : mask.row(qb)) {
      const Index c0 = mask.block_begin(kb), nc = mask.block_size(kb);
      for (Index i = r0; i < r0 + nr; ++i)
        for (Index j = c0; j < std::min(c0 + nc, i + 1); ++j) m.set(i, j);
    }
  }
  return m;
}

void EntryMask::set(Index i, Index j, bool on) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw InputError("EntryMask: index out of range");
  if (j > i && on) throw InputError("EntryMask: acausal entry cannot be set");
  bits_[i * cols_ + j] = on ? 1 : 0;
}

Index EntryMask::active_count() const {
  return static_cast<Index>(std::count(bits_.begin(), bits_.end(), 1));
}

namespace {

CraResult summarize(std::vector<double> row_mass) {
  CraResult r;
  if (row_mass.empty()) return r;
  r.cra = *std::min_element(row_mass.begin(), row_mass.end());
  double sum = 0.0;
  for (double m : row_mass) sum += m;
  r.mean_retained = sum / static_cast<double>(row_mass.size());
  r.row_mass = std::move(row_mass);
  return r;
}

}  // namespace

CraResult cra_of_mask(const MatrixXd& p, const EntryMask& mask) {
  if (p.rows() != mask.rows() || p.cols() != mask.cols())
    throw InputError("cra_of_mask: mask dimensions do not match P");
  std::vector<double> mass(p.rows(), 0.0);
  for (Index i = 0; i < p.rows(); ++i)
    for (Index j = 0; j < p.cols(); ++j)
      if (mask(i, j)) mass[i] += p(i, j);
  return summarize(std::move(mass));
}

template <typename Scalar>
RowNormalizers row_normalizers(const AttentionHead<Scalar>& head) {
  validate(head);
  const Index s = head.seq_len();
  const MatrixXd k = head.k.template cast<double>();
  RowNormalizers n{VectorXd(s), VectorXd(s)};
  for (Index r0 = 0; r0 < s; r0 += kOraclePanelRows) {
    const Index rows = std::min(kOraclePanelRows, s - r0);
    const MatrixXd scores =
        scaled_scores(head.q.middleRows(r0, rows), k.topRows(r0 + rows),
                      head.head_dim());
    for (Index r = 0; r < rows; ++r) {
      const Index i = r0 + r;
      double max = scores(r, 0);
      for (Index j = 1; j <= i; ++j) max = std::max(max, scores(r, j));
      double sum = 0.0;
      for (Index j = 0; j <= i; ++j) sum += std::exp(scores(r, j) - max);
      n.row_max[i] = max;
      n.row_sum[i] = sum;
    }
  }
  return n;
}

template <typename Scalar>
CraResult cra_of_block_mask(const AttentionHead<Scalar>& head,
                            const BlockMask& mask,
                            const RowNormalizers& norms) {
  validate(head);
  if (mask.seq_len() != head.seq_len())
    throw InputError("cra_of_block_mask: mask built for a different S");
  const Index d = head.head_dim();
  const MatrixXd k = head.k.template cast<double>();
  std::vector<double> mass(head.seq_len(), 0.0);
  for (Index qb = 0; qb < mask.n_qblocks(); ++qb) {
    const Index r0 = mask.block_begin(qb), nr = mask.block_size(qb);
    const MatrixXd q = head.q.middleRows(r0, nr).template cast<double>();
    for (Index kb : mask.row(qb)) {
      const Index c0 = mask.block_begin(kb), nc = mask.block_size(kb);
      const MatrixXd s = scaled_scores(q, k.middleRows(c0, nc), d);
      for (Index r = 0; r < nr; ++r) {
        const Index i = r0 + r;
        for (Index c = 0; c < nc && c0 + c <= i; ++c)
          mass[i] += std::exp(s(r, c) - norms.row_max[i]) / norms.row_sum[i];
      }
    }
  }
  return summarize(std::move(mass));
}

Index minimal_mass_count(std::span<const double> row, double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw InputError("minimal_mass_fraction: alpha must lie in [0, 1]");
  if (alpha == 0.0 || row.empty()) return 0;
  std::vector<double> sorted(row.begin(), row.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double total = 0.0;
  for (double v : sorted) total += v;
  const double need = alpha * total;
  double cum = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cum += sorted[k];
    if (cum >= need) return static_cast<Index>(k + 1);
  }
  return static_cast<Index>(sorted.size());
}

double minimal_mass_fraction(const MatrixXd& p, double alpha) {
  if (p.rows() != p.cols())
    throw InputError("minimal_mass_fraction: P must be square");
  if (alpha < 0.0 || alpha > 1.0)
    throw InputError("minimal_mass_fraction: alpha must lie in [0, 1]");
  const Index s = p.rows();
  Index counted = 0;
  for (Index i = 0; i < s; ++i)
    counted += minimal_mass_count(
        std::span<const double>(p.row(i).data(), i + 1), alpha);
  return static_cast<double>(counted) / static_cast<double>(s * (s + 1) / 2);
}

template <typename Scalar>
double minimal_mass_fraction(const AttentionHead<Scalar>& head, double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw InputError("minimal_mass_fraction: alpha must lie in [0, 1]");
  validate(head);
  const Index s = head.seq_len();
  Index counted = 0;
  for_each_probability_panel(
      head, kOraclePanelRows, [&](Index r0, const MatrixXd& p) {
        for (Index r = 0; r < p.rows(); ++r)
          counted += minimal_mass_count(
              std::span<const double>(p.row(r).data(), r0 + r + 1), alpha);
      });
  return static_cast<double>(counted) / static_cast<double>(s * (s + 1) / 2);
}

double sparsity_ratio(const EntryMask& mask) {
  if (mask.rows() != mask.cols())
    throw InputError("sparsity_ratio: square mask required");
  const Index s = mask.rows();
  if (s == 0) return 0.0;
  return 1.0 - static_cast<double>(mask.active_count()) /
                   static_cast<double>(s * (s + 1) / 2);
}

double sparsity_ratio(const BlockMask& mask) {
  const Index s = mask.seq_len();
  Index active = 0;
  for (Index qb = 0; qb < mask.n_qblocks(); ++qb) {
    const Index nr = mask.block_size(qb);
    for (Index kb : mask.row(qb)) {
      if (kb == qb)
        active += nr * (nr + 1) / 2;
      else
        active += nr * mask.block_size(kb);
    }
  }
  return 1.0 - static_cast<double>(active) / static_cast<double>(s * (s + 1) / 2);
}

double output_error(const MatrixXd& o_sparse, const MatrixXd& o_dense) {
  if (o_sparse.rows() != o_dense.rows() || o_sparse.cols() != o_dense.cols())
    throw InputError("output_error: shape mismatch");
  double worst = 0.0;
  for (Index r = 0; r < o_dense.rows(); ++r) {
    const double num = (o_sparse.row(r) - o_dense.row(r)).norm();
    const double den = std::max(o_dense.row(r).norm(), 1e-12);
    worst = std::max(worst, num / den);
  }
  return worst;
}

template RowNormalizers row_normalizers(const AttentionHead<float>&);
template RowNormalizers row_normalizers(const AttentionHead<double>&);
template CraResult cra_of_block_mask(const AttentionHead<float>&,
                                     const BlockMask&, const RowNormalizers&);
template CraResult cra_of_block_mask(const AttentionHead<double>&,
                                     const BlockMask&, const RowNormalizers&);
template double minimal_mass_fraction(const AttentionHead<float>&, double);
template double minimal_mass_fraction(const AttentionHead<double>&, double);

}  // namespace sampattn
