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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sampattn/cra.hpp"
#include "sampattn/sparse_exec.hpp"

namespace sampattn {
namespace {

using testing::finite_penalty_attention;
using testing::naive_attention;
using testing::random_block_mask;
using testing::random_head;

double max_abs(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

TEST(SparseAttention, FullMaskMatchesDense) {
  const auto h = random_head(512, 64, 1);
  const SparseResult r = sparse_attention(h, BlockMask::full_causal(512, 128));
  EXPECT_LE(max_abs(r.output, naive_attention(h)), 1e-6);
  EXPECT_EQ(r.touched_blocks, 10);
}

TEST(SparseAttention, DiagonalMaskTinyExample) {
  const auto h = random_head(4, 2, 2);
  const BlockMask m = BlockMask::diagonal(4, 2);
  const SparseResult r = sparse_attention(h, m);
  EXPECT_LE(max_abs(r.output, masked_dense_attention(h, m)), 1e-12);
  // Query 0 and query 2 see only themselves.
  EXPECT_NEAR(r.output(0, 0), h.v(0, 0), 1e-12);
  EXPECT_NEAR(r.output(2, 1), h.v(2, 1), 1e-12);
}

TEST(SparseAttention, RandomMasksMatchMaskedOracle) {
  for (unsigned seed = 0; seed < 50; ++seed) {
    const Index s = 256 - Index(seed % 7);
    const auto h = random_head(s, 16, seed, 1.2);
    const BlockMask m = random_block_mask(s, 32, 0.35, seed + 100);
    const SparseResult r = sparse_attention(h, m);
    EXPECT_LE(max_abs(r.output, masked_dense_attention(h, m)), 1e-5) << "seed " << seed;
    EXPECT_EQ(r.touched_blocks, m.active_count());
  }
}

TEST(SparseAttention, ExclusionMatchesLargeFinitePenalty) {
  const auto h = random_head(96, 8, 9);
  const BlockMask m = random_block_mask(96, 16, 0.3, 4);
  const EntryMask em = EntryMask::from_blocks(m);
  const MatrixXd finite =
      finite_penalty_attention(h, [&](Index i, Index j) { return em(i, j); }, 1e4);
  EXPECT_LE(max_abs(sparse_attention(h, m).output, finite), 1e-6);
}

TEST(SparseAttention, NormalizersSumToOneOverActiveEntries) {
  const auto h = random_head(200, 8, 10, 2.0);
  const BlockMask m = random_block_mask(200, 32, 0.5, 7);
  const SparseResult r = sparse_attention(h, m);
  const MatrixXd s = testing::naive_scores(h.q.cast<double>(), h.k.cast<double>());
  const EntryMask em = EntryMask::from_blocks(m);
  for (Index i = 0; i < 200; ++i) {
    double total = 0.0;
    for (Index j = 0; j <= i; ++j)
      if (em(i, j)) total += std::exp(s(i, j) - r.row_max[i]) / r.row_sum[i];
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(SparseAttention, StableUnderHugeLogits) {
  auto h = random_head(128, 4, 11);
  h.q *= 400.0f;
  h.k *= 400.0f;
  const BlockMask m = random_block_mask(128, 16, 0.5, 3);
  const SparseResult r = sparse_attention(h, m);
  EXPECT_TRUE(r.output.allFinite());
  EXPECT_LE(max_abs(r.output, masked_dense_attention(h, m)), 1e-6);
}

TEST(SparseAttention, Errors) {
  const auto h = random_head(16, 4, 1);
  EXPECT_THROW(sparse_attention(h, BlockMask::diagonal(32, 4)), InputError);
  BlockMask holes(16, 4);
  holes.activate(0, 0);
  EXPECT_THROW(sparse_attention(h, holes), InputError);
}

TEST(MaskedDense, AllOnesEqualsDenseAndDiagonalCopiesValues) {
  const auto h = random_head(40, 4, 12);
  EXPECT_LE(max_abs(masked_dense_attention(h, EntryMask::full_causal(40)), naive_attention(h)),
            1e-12);
  EntryMask diag(40, 40);
  for (Index i = 0; i < 40; ++i) diag.set(i, i);
  const MatrixXd o = masked_dense_attention(h, diag);
  for (Index i = 0; i < 40; ++i)
    for (Index c = 0; c < 4; ++c) EXPECT_EQ(o(i, c), double(h.v(i, c)));
}

TEST(FlopAccounting, FullAndDiagonal) {
  const FlopReport full = flop_accounting(BlockMask::full_causal(1024, 128), 64);
  EXPECT_EQ(full.block_density, 1.0);
  EXPECT_EQ(full.flops_sparse, full.flops_dense);
  EXPECT_EQ(full.causal_blocks, 36);
  const FlopReport diag = flop_accounting(BlockMask::diagonal(1024, 128), 64);
  EXPECT_DOUBLE_EQ(diag.block_density, 2.0 / (8 + 1));
  EXPECT_DOUBLE_EQ(diag.flops_sparse / diag.flops_dense, 2.0 / 9.0);
  EXPECT_DOUBLE_EQ(diag.flops_sparse, 8 * 4.0 * 64 * 128 * 128);
}

TEST(FlopAccounting, RandomMasksMatchEnumeration) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const BlockMask m = random_block_mask(1000, 64, 0.4, seed);
    const FlopReport f = flop_accounting(m, 32);
    Index active = 0;
    double flops = 0.0;
    for (Index qb = 0; qb < m.n_qblocks(); ++qb)
      for (Index kb = 0; kb <= qb; ++kb)
        if (m.active(qb, kb)) {
          ++active;
          flops += 4.0 * 32 * m.block_size(qb) * m.block_size(kb);
        }
    EXPECT_EQ(f.active_blocks, active);
    EXPECT_DOUBLE_EQ(f.block_density, double(active) / double(m.causal_block_count()));
    EXPECT_DOUBLE_EQ(f.flops_sparse, flops);
  }
}

}  // namespace
}  // namespace sampattn
