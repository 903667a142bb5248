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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sampattn/block_mask.hpp"
#include "sampattn/core.hpp"
#include "sampattn/sampler.hpp"
#include "sampattn/sparse_exec.hpp"

namespace sampattn {

/// Full-P metrics are only computed up to this sequence length.
inline constexpr Index kOracleCap = 8192;

struct HeadMetrics {
  Index head_id = 0;
  std::optional<double> cra_full;       // min over rows, dense P
  std::optional<double> cra_full_mean;  // mean over rows, dense P
  double cra_sampled = 0.0;             // min over sampled rows
  double sparsity_ratio = 0.0;
  double block_density = 0.0;
  std::optional<double> output_error;
  Index active_blocks = 0;
  Index causal_blocks = 0;
  Index touched_blocks = 0;
  double flops_sparse = 0.0;
  double flops_dense = 0.0;
  double flops_ratio = 0.0;
  std::vector<Index> k_c;  // per chunk
  std::vector<Index> k_s;
  // Seconds; excluded from deterministic serialization.
  double time_sampling = 0.0;
  double time_filtering = 0.0;
  double time_sparse = 0.0;
  double time_dense = 0.0;
};

struct MetricsReport {
  SparseConfig config;
  Index effective_chunk_n = 0;
  Index seq_len = 0;
  Index head_dim = 0;
  std::optional<std::uint64_t> seed;
  bool oracle = false;  // full-P metrics present
  std::string cra_basis;  // "full" or "sampled"
  std::vector<HeadMetrics> heads;

  // Aggregates over heads.
  double cra_full_min = 0.0;
  double cra_full_mean = 0.0;
  double cra_sampled_min = 0.0;
  double sparsity_ratio_mean = 0.0;
  double block_density_mean = 0.0;
  double output_error_max = 0.0;
  double flops_sparse_total = 0.0;
  double flops_dense_total = 0.0;
  double flops_ratio = 0.0;
  double time_sparse_total = 0.0;  // sampling + filtering + sparse attention
  double time_dense_total = 0.0;
};

/// Everything stage one and two produce for a head, before execution.
struct HeadPlan {
  ChunkPlan plan;
  SampledScores samples;
  ReducedScores reduced;
  BlockMask mask;
};

/// plan_chunks -> sample_scores -> block_reduce -> select_and_merge, with
/// the conservation and sampled-row guarantees asserted (InvariantError).
HeadPlan build_mask(const Head& head, const SparseConfig& cfg);

/// Min over sampled rows of the probability mass the mask keeps.
double sampled_cra(const SampledScores& samples, const BlockMask& mask);

struct PipelineResult {
  MetricsReport report;
  std::vector<BlockMask> masks;
  std::vector<MatrixXd> outputs;
};

PipelineResult run_pipeline(const HeadSet& heads, const SparseConfig& cfg,
                            bool want_oracle,
                            std::optional<std::uint64_t> seed = {});

}  // namespace sampattn
