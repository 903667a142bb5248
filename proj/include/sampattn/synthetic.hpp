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

// Synthetic heads with planted column (sink) and slash structure.
//
// Each sink owns one query/key dimension: the sink key holds sqrt(d) there and
// query i holds beta + log(i + 1), so the sink logit tracks the log of the
// causal support and the planted share stays flat across rows. Slashes share
// a block of rotating planes: key j is x rotated by j, query i is a weighted
// sum of x rotated by i - o, so q_i . k_j depends on i - j only and peaks at
// offset o. The remaining dimensions carry Gaussian noise with logit standard
// deviation `noise_scale`. Betas are calibrated against the dense oracle.

#include <cstdint>
#include <string>
#include <vector>

#include "sampattn/core.hpp"

namespace sampattn {

struct PlantedPattern {
  Index where = 0;    // key position (sink) or q - j offset (slash)
  double mass = 0.0;  // target mean probability per eligible row
};

struct SyntheticSpec {
  Index seq_len = 1024;
  Index head_dim = 64;
  Index n_heads = 1;
  std::vector<PlantedPattern> sinks;
  std::vector<PlantedPattern> slashes;
  double noise_scale = 0.5;
  std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);

inline constexpr int kMaxCalibrationIterations = 20;
inline constexpr double kCalibrationTolerance = 0.02;  // stop early
inline constexpr double kCalibrationAcceptance = 0.20;  // fail beyond

/// Throws GeneratorError when a target stays more than 20% (relative) off
/// after the iteration budget.
HeadSet generate_synthetic(const SyntheticSpec& spec);

}  // namespace sampattn
