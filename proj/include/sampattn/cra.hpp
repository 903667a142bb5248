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

// Ground-truth accuracy metrics computed from the dense probability matrix.
// CRA is measured on the original P, not on the renormalized sparse P.

#include <vector>

#include "sampattn/block_mask.hpp"
#include "sampattn/core.hpp"

namespace sampattn {

/// Token-level binary mask. Acausal entries (j > i) are always zero.
class EntryMask {
 public:
  EntryMask(Index rows, Index cols);

  static EntryMask full_causal(Index s);
  static EntryMask from_blocks(const BlockMask& mask);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool operator()(Index i, Index j) const { return bits_[i * cols_ + j] != 0; }
  /// Setting an acausal entry throws InputError.
  void set(Index i, Index j, bool on = true);
  Index active_count() const;

 private:
  Index rows_;
  Index cols_;
  std::vector<unsigned char> bits_;
};

struct CraResult {
  double cra = 0.0;             // min over rows of retained mass
  double mean_retained = 0.0;   // mean over rows
  std::vector<double> row_mass;
};

CraResult cra_of_mask(const MatrixXd& p, const EntryMask& mask);

/// Per-row softmax normalizers of the dense causal logits: P[i][j] =
/// exp(s[i][j] - row_max[i]) / row_sum[i].
struct RowNormalizers {
  VectorXd row_max;
  VectorXd row_sum;
};

template <typename Scalar>
RowNormalizers row_normalizers(const AttentionHead<Scalar>& head);

/// CRA of a block mask measured against the dense P of `head` without
/// holding P: only active blocks' logits are recomputed.
template <typename Scalar>
CraResult cra_of_block_mask(const AttentionHead<Scalar>& head,
                            const BlockMask& mask,
                            const RowNormalizers& norms);

template <typename Scalar>
CraResult cra_of_block_mask(const AttentionHead<Scalar>& head,
                            const BlockMask& mask) {
  return cra_of_block_mask(head, mask, row_normalizers(head));
}

/// Minimal number of largest entries per row whose sum reaches alpha, summed
/// over rows and divided by the number of causal entries S(S+1)/2.
/// `p` is square and causal row-stochastic.
double minimal_mass_fraction(const MatrixXd& p, double alpha);

/// Streaming form over a head's dense P.
template <typename Scalar>
double minimal_mass_fraction(const AttentionHead<Scalar>& head, double alpha);

/// Entries needed in one probability row (length = causal support).
Index minimal_mass_count(std::span<const double> row, double alpha);

double sparsity_ratio(const EntryMask& mask);
/// Entry-level sparsity of a block mask, counted exactly without expansion.
double sparsity_ratio(const BlockMask& mask);

/// max over rows of |a_r - b_r|_2 / max(|b_r|_2, 1e-12).
double output_error(const MatrixXd& o_sparse, const MatrixXd& o_dense);

extern template RowNormalizers row_normalizers(const AttentionHead<float>&);
extern template RowNormalizers row_normalizers(const AttentionHead<double>&);
extern template CraResult cra_of_block_mask(const AttentionHead<float>&,
                                            const BlockMask&,
                                            const RowNormalizers&);
extern template CraResult cra_of_block_mask(const AttentionHead<double>&,
                                            const BlockMask&,
                                            const RowNormalizers&);
extern template double minimal_mass_fraction(const AttentionHead<float>&,
                                             double);
extern template double minimal_mass_fraction(const AttentionHead<double>&,
                                             double);

}  // namespace sampattn
