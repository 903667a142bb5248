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

#include "sampattn/tuner.hpp"

#include <algorithm>
#include <map>

#include "sampattn/cra.hpp"
#include "sampattn/filtering.hpp"
#include "sampattn/pipeline.hpp"

namespace sampattn {

std::vector<LengthRange> ranges_from_lengths(std::vector<Index> lengths) {
  if (lengths.empty()) throw InputError("tune: at least one length required");
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  std::vector<LengthRange> out;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    LengthRange r;
    r.lo = lengths[i];
    if (i + 1 < lengths.size()) r.hi = lengths[i + 1];
    out.push_back(r);
  }
  return out;
}

void validate(const TuneGrid& grid) {
  if (grid.alphas_c.empty() || grid.alphas_s.empty() || grid.chunk_ns.empty() ||
      grid.length_ranges.empty())
    throw InputError("tune: grid lists must be nonempty");
  for (double a : grid.alphas_c)
    if (!(a >= 0.0 && a <= 1.0)) throw InputError("tune: alpha_c outside [0, 1]");
  for (double a : grid.alphas_s)
    if (!(a >= 0.0 && a <= 1.0)) throw InputError("tune: alpha_s outside [0, 1]");
  for (Index c : grid.chunk_ns)
    if (c < 1) throw InputError("tune: chunk_n must be >= 1");
  for (const auto& r : grid.length_ranges)
    if (r.lo < 1 || r.hi <= r.lo) throw InputError("tune: bad length range");
  if (!(grid.recall_target >= 0.0 && grid.recall_target <= 1.0))
    throw InputError("tune: recall_target outside [0, 1]");
  if (grid.trials_per_cell < 1) throw InputError("tune: trials_per_cell must be >= 1");
  if (grid.blk < 1) throw InputError("tune: blk must be >= 1");
}

bool TuneResult::all_feasible() const {
  return std::all_of(ranges.begin(), ranges.end(),
                     [](const RangeChoice& r) { return r.feasible; });
}

std::optional<SparseConfig> TuneResult::config_for(Index seq_len, Index blk) const {
  const RangeChoice* pick = nullptr;
  for (const auto& r : ranges) {
    if (r.range.contains(seq_len)) {
      pick = &r;
      break;
    }
    if (r.range.lo <= seq_len) pick = &r;
  }
  if (!pick || !pick->best) return std::nullopt;
  return SparseConfig{pick->best->alpha_c, pick->best->alpha_s,
                      pick->best->chunk_n, blk};
}

namespace {

bool better(const TuneCell& a, const TuneCell& b) {
  if (a.mean_density != b.mean_density) return a.mean_density < b.mean_density;
  if (a.chunk_n != b.chunk_n) return a.chunk_n < b.chunk_n;
  return a.alpha_c + a.alpha_s < b.alpha_c + b.alpha_s;
}

}  // namespace

TuneResult tune(const TuneGrid& grid, const SyntheticSpec& task) {
  validate(grid);
  validate(task);
  TuneResult result;
  result.recall_target = grid.recall_target;

  for (std::size_t ri = 0; ri < grid.length_ranges.size(); ++ri) {
    const LengthRange range = grid.length_ranges[ri];
    RangeChoice choice;
    choice.range = range;
    choice.task_seq_len = range.lo;
    const bool oracle = range.lo <= kOracleCap;
    choice.cra_basis = oracle ? "full" : "sampled";

    const std::size_t first_cell = result.cells.size();
    for (Index chunk_n : grid.chunk_ns)
      for (double ac : grid.alphas_c)
        for (double as : grid.alphas_s) {
          TuneCell cell;
          cell.range = ri;
          cell.alpha_c = ac;
          cell.alpha_s = as;
          cell.chunk_n = chunk_n;
          result.cells.push_back(cell);
        }
    const std::size_t n_cells = result.cells.size() - first_cell;
    double samples = 0.0;

    for (Index t = 0; t < grid.trials_per_cell; ++t) {
      SyntheticSpec spec = task;
      spec.seq_len = range.lo;
      spec.seed = task.seed + static_cast<std::uint64_t>(t);
      const HeadSet heads = generate_synthetic(spec);
      for (const Head& head : heads.heads) {
        std::optional<RowNormalizers> norms;
        if (oracle) norms = row_normalizers(head);
        // Stage one depends only on chunk_n; reuse it across the alpha grid.
        std::map<Index, std::pair<ChunkPlan, ReducedScores>> stage_one;
        std::map<Index, SampledScores> sampled;
        for (std::size_t c = 0; c < n_cells; ++c) {
          TuneCell& cell = result.cells[first_cell + c];
          SparseConfig cfg{cell.alpha_c, cell.alpha_s, cell.chunk_n, grid.blk};
          auto it = stage_one.find(cell.chunk_n);
          if (it == stage_one.end()) {
            ChunkPlan plan = plan_chunks(head.seq_len(), cfg);
            SampledScores s = sample_scores(head, plan);
            ReducedScores red = block_reduce(s, head.seq_len(), grid.blk);
            sampled.emplace(cell.chunk_n, std::move(s));
            it = stage_one.emplace(cell.chunk_n, std::make_pair(std::move(plan), std::move(red))).first;
          }
          const BlockMask mask = select_and_merge(it->second.second, it->second.first, cfg);
          cell.effective_chunk_n = it->second.first.chunk_n;
          const double cra = oracle ? cra_of_block_mask(head, mask, *norms).cra
                                    : sampled_cra(sampled.at(cell.chunk_n), mask);
          cell.mean_cra += cra;
          cell.mean_density += mask.density();
        }
        samples += 1.0;
      }
    }

    for (std::size_t c = 0; c < n_cells; ++c) {
      TuneCell& cell = result.cells[first_cell + c];
      cell.mean_cra /= samples;
      cell.mean_density /= samples;
      cell.feasible = cell.mean_cra >= grid.recall_target;
      if (cell.feasible && (!choice.best || better(cell, *choice.best)))
        choice.best = cell;
    }
    choice.feasible = choice.best.has_value();
    result.ranges.push_back(choice);
  }
  return result;
}

}  // namespace sampattn
