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

#include <sstream>

#include "oracles.hpp"
#include "sampattn/pipeline.hpp"
#include "sampattn/report.hpp"
#include "sampattn/synthetic.hpp"

namespace sampattn {
namespace {

SyntheticSpec structured(Index s, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.seq_len = s;
  spec.head_dim = 32;
  spec.n_heads = 2;
  spec.sinks = {{0, 0.3}};
  spec.slashes = {{0, 0.4}};
  spec.noise_scale = 0.4;
  spec.seed = seed;
  return spec;
}

TEST(Pipeline, AlphaOneSingleChunkIsNearlyExact) {
  const HeadSet set = generate_synthetic(structured(256, 1));
  SparseConfig cfg;
  cfg.alpha_c = cfg.alpha_s = 1.0;
  const PipelineResult r = run_pipeline(set, cfg, true);
  ASSERT_TRUE(r.report.oracle);
  EXPECT_LE(r.report.output_error_max, 1e-5);
  EXPECT_NEAR(r.report.cra_full_min, 1.0, 1e-9);
}

TEST(Pipeline, ReportFieldsConsistent) {
  const HeadSet set = generate_synthetic(structured(1024, 2));
  SparseConfig cfg;
  cfg.chunk_n = 2;
  const PipelineResult r = run_pipeline(set, cfg, true, 2);
  EXPECT_EQ(r.report.cra_basis, "full");
  EXPECT_EQ(r.report.effective_chunk_n, 2);
  ASSERT_EQ(r.report.heads.size(), 2u);
  for (const HeadMetrics& h : r.report.heads) {
    ASSERT_TRUE(h.cra_full && h.cra_full_mean && h.output_error);
    EXPECT_LE(*h.cra_full, *h.cra_full_mean);
    EXPECT_EQ(h.touched_blocks, h.active_blocks);
    EXPECT_DOUBLE_EQ(h.flops_ratio, h.block_density);
    EXPECT_GE(h.sparsity_ratio, 1.0 - h.block_density - 1e-12);
    EXPECT_EQ(h.k_c.size(), 2u);
  }
  EXPECT_EQ(r.masks.size(), 2u);
  EXPECT_TRUE(r.masks[0].has_diagonal());
}

TEST(Pipeline, SampledCraHonoursAlphaOnSampledRows) {
  const HeadSet set = generate_synthetic(structured(1024, 3));
  SparseConfig cfg;
  cfg.alpha_c = cfg.alpha_s = 0.9;
  for (const Head& h : set.heads) {
    const HeadPlan hp = build_mask(h, cfg);
    for (const ChunkSelection& cs : hp.mask.provenance->chunks) {
      EXPECT_GE(cs.column_retained, 0.9 * cs.column_total);
      EXPECT_GE(cs.slash_retained, 0.9 * cs.slash_total);
    }
    EXPECT_GT(sampled_cra(hp.samples, hp.mask), 0.0);
  }
}

TEST(Pipeline, DeterministicOutputs) {
  const SyntheticSpec spec = structured(512, 4);
  SparseConfig cfg;
  cfg.chunk_n = 2;
  cfg.alpha_c = 0.9;
  const PipelineResult a = run_pipeline(generate_synthetic(spec), cfg, true, spec.seed);
  const PipelineResult b = run_pipeline(generate_synthetic(spec), cfg, true, spec.seed);
  EXPECT_EQ(to_json(a.report, false).dump(), to_json(b.report, false).dump());
  for (std::size_t h = 0; h < a.masks.size(); ++h) {
    EXPECT_EQ(to_text(a.masks[h]), to_text(b.masks[h]));
    EXPECT_EQ(a.outputs[h], b.outputs[h]);
  }
}

TEST(Pipeline, OracleSkippedAboveCap) {
  HeadSet set;
  set.seq_len = kOracleCap + 8;
  set.head_dim = 4;
  set.heads.push_back(testing::random_head(set.seq_len, 4, 1, 0.1));
  SparseConfig cfg;
  cfg.alpha_c = cfg.alpha_s = 0.5;
  const PipelineResult r = run_pipeline(set, cfg, true);
  EXPECT_FALSE(r.report.oracle);
  EXPECT_EQ(r.report.cra_basis, "sampled");
  EXPECT_FALSE(r.report.heads[0].cra_full.has_value());
  const Json j = to_json(r.report, false);
  EXPECT_TRUE(j.contains("oracle_note"));
}

TEST(Pipeline, JsonEchoesConfig) {
  const HeadSet set = generate_synthetic(structured(256, 5));
  const PipelineResult r = run_pipeline(set, SparseConfig{}, false);
  const Json j = to_json(r.report, true);
  EXPECT_EQ(j["alpha_c"], 0.95);
  EXPECT_EQ(j["alpha_s"], 0.95);
  EXPECT_EQ(j["chunk_n"], 1);
  EXPECT_EQ(j["blk"], 128);
  EXPECT_TRUE(j.contains("time_sparse_s"));
  EXPECT_FALSE(to_json(r.report, false).contains("time_sparse_s"));
}

}  // namespace
}  // namespace sampattn
