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

// Stage one: exact attention rows for the bottom query block of each chunk,
// reduced to block-granular column and slash mass.

#include <vector>

#include "sampattn/block_mask.hpp"
#include "sampattn/core.hpp"

namespace sampattn {

struct SparseConfig {
  double alpha_c = 0.95;  // CRA threshold for column strips
  double alpha_s = 0.95;  // CRA threshold for slash strips
  Index chunk_n = 1;
  Index blk = 128;
};

void validate(const SparseConfig& cfg);

struct SampledRange {
  Index chunk = 0;  // 1-based
  Index sample_begin = 0;
  Index sample_end = 0;
  Index region_begin = 0;
  Index region_end = 0;
};

struct ChunkPlan {
  Index seq_len = 0;
  Index blk = 0;
  Index itv = 0;
  Index requested_chunk_n = 0;
  Index chunk_n = 0;  // effective, after clamping
  std::vector<SampledRange> chunks;

  Index sampled_rows() const;
};

/// Equidistant chunk layout. Never fails: when itv < blk the chunk count is
/// reduced to max(1, S / blk); when S < blk a single range [0, S) is sampled.
ChunkPlan plan_chunks(Index seq_len, const SparseConfig& cfg);

struct ChunkSamples {
  std::vector<Index> rows;  // global query index of each sampled row
  MatrixXd probs;           // rows.size() x S, causal row-stochastic
};

struct SampledScores {
  std::vector<ChunkSamples> chunks;
};

template <typename Scalar>
SampledScores sample_scores(const AttentionHead<Scalar>& head,
                            const ChunkPlan& plan) {
  validate(head);
  if (plan.seq_len != head.seq_len())
    throw InputError("sample_scores: plan built for a different S");
  const MatrixXd k = head.k.template cast<double>();
  SampledScores out;
  out.chunks.reserve(plan.chunks.size());
  for (const SampledRange& range : plan.chunks) {
    ChunkSamples cs;
    const Index n = range.sample_end - range.sample_begin;
    cs.rows.resize(n);
    std::iota(cs.rows.begin(), cs.rows.end(), range.sample_begin);
    cs.probs = causal_row_softmax(
        scaled_scores(head.q.middleRows(range.sample_begin, n), k,
                      head.head_dim()),
        std::span<const Index>(cs.rows));
    out.chunks.push_back(std::move(cs));
  }
  return out;
}

struct ChunkReduction {
  std::vector<double> column;  // mass per key-column block
  std::vector<double> slash;   // mass per (q - j) offset block
  double total_mass = 0.0;
};

struct ReducedScores {
  Index n_blocks = 0;
  std::vector<ChunkReduction> chunks;
};

/// column[b] sums P[q][j] over floor(j/blk) == b; slash[b] sums over
/// floor((q-j)/blk) == b. Offset 0 is the main diagonal.
ReducedScores block_reduce(const SampledScores& samples, Index seq_len,
                           Index blk);

}  // namespace sampattn
