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

// Stage two: per-chunk minimal quotas, top-k block selection, and extension
// of the selected column/slash blocks into a block mask.

#include <span>
#include <vector>

#include "sampattn/block_mask.hpp"
#include "sampattn/sampler.hpp"

namespace sampattn {

/// Indices ordered by descending score, ties toward the lower index.
std::vector<Index> rank_order(std::span<const double> scores);

/// Minimal k such that the k largest scores sum to >= alpha * total, where
/// the cumulative sum and total run over rank order. Returns 0 when the total
/// is 0 or alpha is 0; alpha == 1 yields the number of nonzero scores.
Index find_k(std::span<const double> scores, double alpha);

/// The k largest scores' indices, in rank order.
std::vector<Index> arg_topk(std::span<const double> scores, Index k);

/// Extends per-chunk indices over each chunk's query region:
///  columns:  (qb, kb) for kb in I_c with kb <= qb
///  slashes:  (qb, qb-ob-1) and (qb, qb-ob) for ob in I_s, clipped to [0, qb]
///  diagonal: (qb, qb) always
/// Query blocks straddling two regions take the union.
BlockMask merge_index(const SelectedIndices& selected, const ChunkPlan& plan);

/// find_k and arg_topk in both directions for every chunk.
SelectedIndices select_indices(const ReducedScores& reduced,
                               const SparseConfig& cfg);

BlockMask select_and_merge(const ReducedScores& reduced, const ChunkPlan& plan,
                           const SparseConfig& cfg);

}  // namespace sampattn
