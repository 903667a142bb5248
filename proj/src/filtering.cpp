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

#include "sampattn/filtering.hpp"

#include <algorithm>
#include <numeric>

namespace sampattn {

std::vector<Index> rank_order(std::span<const double> scores) {
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return scores[a] > scores[b];
  });
  return order;
}

Index find_k(std::span<const double> scores, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InputError("find_k: alpha must lie in [0, 1]");
  if (scores.empty()) throw InputError("find_k: scores must be nonempty");
  for (double s : scores)
    if (!(s >= 0.0)) throw InputError("find_k: scores must be nonnegative");
  if (alpha == 0.0) return 0;

  const std::vector<Index> order = rank_order(scores);
  double total = 0.0;
  for (Index i : order) total += scores[i];
  if (total == 0.0) return 0;
  if (alpha == 1.0)
    return static_cast<Index>(
        std::count_if(scores.begin(), scores.end(), [](double s) { return s > 0.0; }));

  const double need = alpha * total;
  double cum = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    cum += scores[order[k]];
    if (cum >= need) return static_cast<Index>(k + 1);
  }
  return static_cast<Index>(order.size());
}

std::vector<Index> arg_topk(std::span<const double> scores, Index k) {
  if (k < 0 || k > static_cast<Index>(scores.size()))
    throw InputError("arg_topk: k exceeds the number of scores");
  std::vector<Index> order = rank_order(scores);
  order.resize(k);
  return order;
}

BlockMask merge_index(const SelectedIndices& selected, const ChunkPlan& plan) {
  if (selected.chunks.size() != plan.chunks.size())
    throw InputError("merge_index: selection and plan disagree on chunk count");
  BlockMask mask(plan.seq_len, plan.blk);
  const Index blk = plan.blk;
  for (std::size_t c = 0; c < plan.chunks.size(); ++c) {
    const SampledRange& range = plan.chunks[c];
    const ChunkSelection& sel = selected.chunks[c];
    const Index first_qb = range.region_begin / blk;
    const Index last_qb = (range.region_end - 1) / blk;
    for (Index qb = first_qb; qb <= last_qb; ++qb) {
      for (Index kb : sel.columns)
        if (kb <= qb) mask.activate(qb, kb);
      for (Index ob : sel.slashes)
        for (Index kb : {qb - ob - 1, qb - ob})
          if (kb >= 0 && kb <= qb) mask.activate(qb, kb);
      mask.activate(qb, qb);
    }
  }
  mask.provenance = selected;
  return mask;
}

namespace {

double rank_sum(std::span<const double> scores, const std::vector<Index>& idx) {
  double s = 0.0;
  for (Index i : idx) s += scores[i];
  return s;
}

}  // namespace

SelectedIndices select_indices(const ReducedScores& reduced,
                               const SparseConfig& cfg) {
  validate(cfg);
  SelectedIndices out;
  for (const ChunkReduction& red : reduced.chunks) {
    ChunkSelection sel;
    sel.k_c = find_k(red.column, cfg.alpha_c);
    sel.columns = arg_topk(red.column, sel.k_c);
    sel.k_s = find_k(red.slash, cfg.alpha_s);
    sel.slashes = arg_topk(red.slash, sel.k_s);
    sel.column_retained = rank_sum(red.column, sel.columns);
    sel.slash_retained = rank_sum(red.slash, sel.slashes);
    sel.column_total = rank_sum(red.column, rank_order(red.column));
    sel.slash_total = rank_sum(red.slash, rank_order(red.slash));
    out.chunks.push_back(std::move(sel));
  }
  return out;
}

BlockMask select_and_merge(const ReducedScores& reduced, const ChunkPlan& plan,
                           const SparseConfig& cfg) {
  return merge_index(select_indices(reduced, cfg), plan);
}

}  // namespace sampattn
