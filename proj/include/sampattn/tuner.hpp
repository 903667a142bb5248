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

// Offline grid search over (alpha_c, alpha_s, chunk_n) per sequence-length
// range. A cell is feasible when its mean CRA over seeded synthetic tasks
// reaches the recall target; the feasible cell with the lowest mean block
// density wins (ties: smaller chunk_n, then smaller alpha_c + alpha_s).

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sampattn/sampler.hpp"
#include "sampattn/synthetic.hpp"

namespace sampattn {

struct LengthRange {
  Index lo = 0;
  Index hi = std::numeric_limits<Index>::max();  // exclusive
  bool contains(Index s) const { return s >= lo && s < hi; }
};

/// Consecutive ranges [l0, l1), [l1, l2), ..., [ln, inf) from sorted lengths.
std::vector<LengthRange> ranges_from_lengths(std::vector<Index> lengths);

struct TuneGrid {
  std::vector<double> alphas_c{0.90, 0.95, 0.98};
  std::vector<double> alphas_s{0.90, 0.95, 0.98};
  std::vector<Index> chunk_ns{1, 2, 4, 6};
  std::vector<LengthRange> length_ranges{{1024, 4096}, {4096, 16384}, {16384}};
  double recall_target = 0.9;
  Index trials_per_cell = 2;
  Index blk = 128;
};

void validate(const TuneGrid& grid);

struct TuneCell {
  std::size_t range = 0;
  double alpha_c = 0.0;
  double alpha_s = 0.0;
  Index chunk_n = 0;
  Index effective_chunk_n = 0;
  double mean_cra = 0.0;      // basis given by the owning range
  double mean_density = 0.0;
  bool feasible = false;
};

struct RangeChoice {
  LengthRange range;
  Index task_seq_len = 0;  // tasks are generated at range.lo
  std::string cra_basis;   // "full" or "sampled"
  bool feasible = false;
  std::optional<TuneCell> best;
};

struct TuneResult {
  double recall_target = 0.0;
  std::vector<RangeChoice> ranges;
  std::vector<TuneCell> cells;

  bool all_feasible() const;
  /// Config for a sequence length: the owning range, or the last range below
  /// it when S lies past every range.
  std::optional<SparseConfig> config_for(Index seq_len, Index blk = 128) const;
};

/// Trial t of a range uses task.seed + t and S = range.lo.
TuneResult tune(const TuneGrid& grid, const SyntheticSpec& task);

}  // namespace sampattn
