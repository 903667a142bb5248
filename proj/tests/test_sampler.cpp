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
#include "sampattn/sampler.hpp"

namespace sampattn {
namespace {

using testing::naive_prob_row;
using testing::random_head;

SparseConfig cfg_with(Index chunk_n, Index blk) {
  SparseConfig c;
  c.chunk_n = chunk_n;
  c.blk = blk;
  return c;
}

TEST(SparseConfig, Defaults) {
  const SparseConfig c;
  EXPECT_EQ(c.alpha_c, 0.95);
  EXPECT_EQ(c.alpha_s, 0.95);
  EXPECT_EQ(c.chunk_n, 1);
  EXPECT_EQ(c.blk, 128);
  EXPECT_NO_THROW(validate(c));
}

TEST(SparseConfig, RejectsOutOfRange) {
  SparseConfig c;
  c.alpha_c = 1.01;
  EXPECT_THROW(validate(c), InputError);
  c = {};
  c.alpha_s = -0.5;
  EXPECT_THROW(validate(c), InputError);
  c = {};
  c.chunk_n = 0;
  EXPECT_THROW(validate(c), InputError);
  c = {};
  c.blk = 0;
  EXPECT_THROW(validate(c), InputError);
}

TEST(PlanChunks, TinySequence) {
  const ChunkPlan p = plan_chunks(8, cfg_with(1, 2));
  ASSERT_EQ(p.chunks.size(), 1u);
  EXPECT_EQ(p.itv, 8);
  EXPECT_EQ(p.chunks[0].sample_begin, 6);
  EXPECT_EQ(p.chunks[0].sample_end, 8);
}

TEST(PlanChunks, TwoChunksEvenSplit) {
  const ChunkPlan p = plan_chunks(1024, cfg_with(2, 128));
  ASSERT_EQ(p.chunks.size(), 2u);
  EXPECT_EQ(p.itv, 512);
  EXPECT_EQ(p.chunks[0].sample_begin, 384);
  EXPECT_EQ(p.chunks[0].sample_end, 512);
  EXPECT_EQ(p.chunks[1].sample_begin, 896);
  EXPECT_EQ(p.chunks[1].sample_end, 1024);
  EXPECT_EQ(p.chunks[0].region_begin, 0);
  EXPECT_EQ(p.chunks[0].region_end, 512);
  EXPECT_EQ(p.chunks[1].region_end, 1024);
}

TEST(PlanChunks, LastRegionAbsorbsRemainder) {
  const ChunkPlan p = plan_chunks(300, cfg_with(2, 128));
  ASSERT_EQ(p.chunks.size(), 2u);
  EXPECT_EQ(p.chunks[0].sample_begin, 22);
  EXPECT_EQ(p.chunks[0].sample_end, 150);
  EXPECT_EQ(p.chunks[1].sample_begin, 172);
  EXPECT_EQ(p.chunks[1].sample_end, 300);
  EXPECT_EQ(p.chunks[1].region_end, 300);
}

TEST(PlanChunks, SequenceShorterThanBlock) {
  const ChunkPlan p = plan_chunks(50, cfg_with(4, 128));
  ASSERT_EQ(p.chunks.size(), 1u);
  EXPECT_EQ(p.chunk_n, 1);
  EXPECT_EQ(p.requested_chunk_n, 4);
  EXPECT_EQ(p.chunks[0].sample_begin, 0);
  EXPECT_EQ(p.chunks[0].sample_end, 50);
}

TEST(PlanChunks, ClampsWhenIntervalBelowBlock) {
  const ChunkPlan p = plan_chunks(512, cfg_with(6, 128));
  EXPECT_EQ(p.chunk_n, 4);
  EXPECT_EQ(p.itv, 128);
}

TEST(PlanChunks, SamplingRatioAtLongContext) {
  const ChunkPlan p = plan_chunks(65536, cfg_with(2, 128));
  EXPECT_EQ(p.sampled_rows(), 256);
  EXPECT_NEAR(double(p.sampled_rows()) / 65536.0, 0.004, 0.0005);
}

TEST(PlanChunks, StructuralProperties) {
  for (Index s : {1, 7, 128, 129, 300, 1000, 4096, 5000})
    for (Index n : {1, 2, 3, 4, 6})
      for (Index blk : {16, 64, 128}) {
        const ChunkPlan p = plan_chunks(s, cfg_with(n, blk));
        ASSERT_FALSE(p.chunks.empty());
        EXPECT_EQ(Index(p.chunks.size()), p.chunk_n);
        EXPECT_LE(p.chunk_n, n);
        Index prev_end = 0, prev_sample_end = 0;
        for (std::size_t c = 0; c < p.chunks.size(); ++c) {
          const SampledRange& r = p.chunks[c];
          EXPECT_EQ(r.chunk, Index(c) + 1);
          EXPECT_EQ(r.region_begin, prev_end);
          EXPECT_LE(r.region_begin, r.sample_begin);
          EXPECT_LE(r.sample_end, r.region_end);
          EXPECT_GE(r.sample_begin, prev_sample_end);
          EXPECT_EQ(r.sample_end - r.sample_begin, std::min(blk, s));
          prev_end = r.region_end;
          prev_sample_end = r.sample_end;
        }
        EXPECT_EQ(prev_end, s);
      }
}

TEST(SampleScores, TinyHeadRowsAreCausal) {
  const auto h = random_head(4, 3, 1);
  const SampledScores ss = sample_scores(h, plan_chunks(4, cfg_with(1, 2)));
  ASSERT_EQ(ss.chunks.size(), 1u);
  const ChunkSamples& c = ss.chunks[0];
  EXPECT_EQ(c.rows, (std::vector<Index>{2, 3}));
  EXPECT_EQ(c.probs(0, 3), 0.0);
  EXPECT_GT(c.probs(0, 2), 0.0);
  EXPECT_GT(c.probs(1, 3), 0.0);
}

TEST(SampleScores, MatchesDenseRows) {
  const auto h = random_head(700, 16, 3, 1.3);
  const ChunkPlan plan = plan_chunks(700, cfg_with(3, 64));
  const SampledScores ss = sample_scores(h, plan);
  for (const ChunkSamples& c : ss.chunks)
    for (std::size_t r = 0; r < c.rows.size(); ++r) {
      const auto want = naive_prob_row(h, c.rows[r]);
      for (Index j = 0; j < 700; ++j) {
        const double w = j <= c.rows[r] ? want[j] : 0.0;
        EXPECT_NEAR(c.probs(Index(r), j), w, 1e-10);
      }
    }
}

TEST(BlockReduce, HandExample) {
  SampledScores ss;
  ChunkSamples c;
  c.rows = {3};
  c.probs.resize(1, 4);
  c.probs << 0.1, 0.2, 0.3, 0.4;
  ss.chunks.push_back(c);
  const ReducedScores r = block_reduce(ss, 4, 2);
  EXPECT_EQ(r.n_blocks, 2);
  ASSERT_EQ(r.chunks.size(), 1u);
  EXPECT_NEAR(r.chunks[0].column[0], 0.3, 1e-15);
  EXPECT_NEAR(r.chunks[0].column[1], 0.7, 1e-15);
  // offsets 3-j: 3,2,1,0 -> block 0 holds offsets {0,1}, block 1 holds {2,3}
  EXPECT_NEAR(r.chunks[0].slash[0], 0.7, 1e-15);
  EXPECT_NEAR(r.chunks[0].slash[1], 0.3, 1e-15);
}

TEST(BlockReduce, MatchesBruteForceAndConservesMass) {
  const Index s = 512, blk = 64;
  const auto h = random_head(s, 8, 5, 1.5);
  const ChunkPlan plan = plan_chunks(s, cfg_with(2, blk));
  const SampledScores ss = sample_scores(h, plan);
  const ReducedScores red = block_reduce(ss, s, blk);
  for (std::size_t ci = 0; ci < ss.chunks.size(); ++ci) {
    const ChunkSamples& c = ss.chunks[ci];
    const Index nb = s / blk;
    std::vector<double> col(nb, 0.0), sl(nb, 0.0);
    for (Index b = 0; b < nb; ++b)
      for (std::size_t r = 0; r < c.rows.size(); ++r)
        for (Index j = b * blk; j < (b + 1) * blk; ++j) col[b] += c.probs(Index(r), j);
    for (std::size_t r = 0; r < c.rows.size(); ++r)
      for (Index j = 0; j <= c.rows[r]; ++j) sl[(c.rows[r] - j) / blk] += c.probs(Index(r), j);
    for (Index b = 0; b < nb; ++b) {
      EXPECT_EQ(red.chunks[ci].column[b], col[b]);
      EXPECT_NEAR(red.chunks[ci].slash[b], sl[b], 1e-12);
    }
    double csum = 0.0, ssum = 0.0;
    for (double x : red.chunks[ci].column) csum += x;
    for (double x : red.chunks[ci].slash) ssum += x;
    EXPECT_NEAR(csum, double(c.rows.size()), 1e-9);
    EXPECT_NEAR(ssum, double(c.rows.size()), 1e-9);
    EXPECT_NEAR(red.chunks[ci].total_mass, double(c.rows.size()), 1e-9);
  }
}

TEST(BlockReduce, RaggedFinalBlock) {
  const auto h = random_head(100, 4, 6);
  const ChunkPlan plan = plan_chunks(100, cfg_with(1, 32));
  const ReducedScores red = block_reduce(sample_scores(h, plan), 100, 32);
  EXPECT_EQ(red.n_blocks, 4);
  double csum = 0.0, ssum = 0.0;
  for (double x : red.chunks[0].column) csum += x;
  for (double x : red.chunks[0].slash) ssum += x;
  EXPECT_NEAR(csum, 32.0, 1e-9);
  EXPECT_NEAR(ssum, 32.0, 1e-9);
}

}  // namespace
}  // namespace sampattn
