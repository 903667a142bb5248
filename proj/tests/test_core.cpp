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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sampattn/core.hpp"

namespace sampattn {
namespace {

using testing::naive_attention;
using testing::naive_scores;
using testing::random_head;

TEST(ScaledScores, ZeroDotProduct) {
  MatrixXd q(1, 1), k(1, 1);
  q << 1;
  k << 0;
  EXPECT_EQ(scaled_scores(q, k, 1)(0, 0), 0.0);
}

TEST(ScaledScores, OrthogonalRows) {
  MatrixXd q(2, 2), k(2, 2);
  q << 1, 0, 0, 1;
  k << 2, 0, 0, 2;
  const MatrixXd s = scaled_scores(q, k, 2);
  EXPECT_DOUBLE_EQ(s(0, 0), 2.0 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(s(1, 1), 2.0 / std::sqrt(2.0));
  EXPECT_EQ(s(0, 1), 0.0);
  EXPECT_EQ(s(1, 0), 0.0);
}

TEST(ScaledScores, MatchesTripleLoop) {
  std::mt19937 rng(7);
  std::normal_distribution<double> n;
  MatrixXd q(8, 4), k(8, 4);
  for (Index i = 0; i < q.size(); ++i) q.data()[i] = n(rng);
  for (Index i = 0; i < k.size(); ++i) k.data()[i] = n(rng);
  const MatrixXd got = scaled_scores(q, k, 4);
  const MatrixXd want = naive_scores(q, k);
  EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ScaledScores, RejectsDimensionMismatch) {
  MatrixXd q(2, 3), k(2, 4);
  q.setZero();
  k.setZero();
  EXPECT_THROW(scaled_scores(q, k, 3), InputError);
  EXPECT_THROW(scaled_scores(q, q, 4), InputError);
}

TEST(CausalSoftmax, UniformLogits) {
  const MatrixXd p = causal_row_softmax(MatrixXd::Zero(2, 2));
  EXPECT_EQ(p(0, 0), 1.0);
  EXPECT_EQ(p(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(p(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(1, 1), 0.5);
}

TEST(CausalSoftmax, LargeOutlierDoesNotOverflow) {
  MatrixXd s = MatrixXd::Zero(4, 4);
  s(3, 2) = 1000.0;
  const MatrixXd p = causal_row_softmax(s);
  EXPECT_TRUE(p.allFinite());
  EXPECT_NEAR(p(3, 2), 1.0, 1e-12);
  EXPECT_NEAR(p(3, 0), 0.0, 1e-300);
}

TEST(CausalSoftmax, RowsStochasticAndCausal) {
  std::mt19937 rng(3);
  std::normal_distribution<double> n(0.0, 3.0);
  MatrixXd s(16, 16);
  for (Index i = 0; i < s.size(); ++i) s.data()[i] = n(rng);
  const MatrixXd p = causal_row_softmax(s);
  for (Index i = 0; i < 16; ++i) {
    EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-9);
    EXPECT_GE(p.row(i).minCoeff(), 0.0);
    for (Index j = i + 1; j < 16; ++j) EXPECT_EQ(p(i, j), 0.0);
  }
}

TEST(CausalSoftmax, ShiftInvariant) {
  std::mt19937 rng(11);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd s(12, 12);
    for (Index i = 0; i < s.size(); ++i) s.data()[i] = n(rng);
    MatrixXd shifted = s;
    for (Index i = 0; i < 12; ++i) shifted.row(i).array() += 37.0 * n(rng);
    EXPECT_LE((causal_row_softmax(s) - causal_row_softmax(shifted)).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(CausalSoftmax, RectangularSliceUsesGlobalRows) {
  const MatrixXd s = MatrixXd::Zero(2, 6);
  const std::vector<Index> rows{2, 5};
  const MatrixXd p = causal_row_softmax(s, std::span<const Index>(rows));
  EXPECT_DOUBLE_EQ(p(0, 0), 1.0 / 3.0);
  EXPECT_EQ(p(0, 3), 0.0);
  EXPECT_DOUBLE_EQ(p(1, 5), 1.0 / 6.0);
  EXPECT_THROW(causal_row_softmax(MatrixXd::Zero(2, 3)), InputError);
  const std::vector<Index> bad{0, 7};
  EXPECT_THROW(causal_row_softmax(s, std::span<const Index>(bad)), InputError);
}

TEST(DenseAttention, UniformCausalWeights) {
  MatrixXd q(2, 1), k(2, 1), v(2, 1);
  q << 1, 1;
  k << 0, 0;
  v << 2, 4;
  const MatrixXd o = dense_causal_attention(make_head(q, k, v));
  EXPECT_DOUBLE_EQ(o(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(o(1, 0), 3.0);
}

TEST(DenseAttention, SingleTokenCopiesValue) {
  const auto h = random_head<double>(1, 5, 2);
  const MatrixXd o = dense_causal_attention(h);
  for (Index c = 0; c < 5; ++c) EXPECT_EQ(o(0, c), h.v(0, c));
}

TEST(DenseAttention, MatchesNaiveReference) {
  const auto h = random_head(64, 8, 5);
  EXPECT_LE((dense_causal_attention(h) - naive_attention(h)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DenseAttention, PanelBoundariesMatchNaive) {
  // S spans several oracle panels with a ragged last panel.
  const auto h = random_head(kOraclePanelRows * 2 + 37, 4, 6);
  EXPECT_LE((dense_causal_attention(h) - naive_attention(h)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DenseAttention, RowsAreConvexCombinationsOfValues) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto h = random_head<double>(48, 6, seed, 2.0);
    const MatrixXd o = dense_causal_attention(h);
    for (Index i = 0; i < 48; ++i)
      for (Index c = 0; c < 6; ++c) {
        const auto col = h.v.col(c).head(i + 1);
        EXPECT_GE(o(i, c), col.minCoeff() - 1e-12);
        EXPECT_LE(o(i, c), col.maxCoeff() + 1e-12);
      }
  }
}

TEST(DenseAttention, RejectsInvalidHeads) {
  auto h = random_head(4, 2, 1);
  h.k = MatrixXf::Zero(5, 2);
  EXPECT_THROW(dense_causal_attention(h), InputError);
  auto g = random_head(4, 2, 1);
  g.v(1, 1) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(dense_causal_attention(g), InputError);
  auto f = random_head(4, 2, 1);
  f.q = MatrixXf::Zero(4, 3);
  EXPECT_THROW(validate(f), InputError);
}

TEST(HeadSet, RejectsMixedShapes) {
  HeadSet set;
  set.seq_len = 4;
  set.head_dim = 2;
  EXPECT_THROW(validate(set), InputError);
  set.heads.push_back(random_head(4, 2, 1));
  EXPECT_NO_THROW(validate(set));
  set.heads.push_back(random_head(5, 2, 1));
  EXPECT_THROW(validate(set), InputError);
}

}  // namespace
}  // namespace sampattn
