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

#include "sampattn/sampler.hpp"

namespace sampattn {

void validate(const SparseConfig& cfg) {
  if (!(cfg.alpha_c >= 0.0 && cfg.alpha_c <= 1.0))
    throw InputError("alpha_c must lie in [0, 1]");
  if (!(cfg.alpha_s >= 0.0 && cfg.alpha_s <= 1.0))
    throw InputError("alpha_s must lie in [0, 1]");
  if (cfg.chunk_n < 1) throw InputError("chunk_n must be >= 1");
  if (cfg.blk < 1) throw InputError("blk must be >= 1");
}

Index ChunkPlan::sampled_rows() const {
  Index n = 0;
  for (const auto& c : chunks) n += c.sample_end - c.sample_begin;
  return n;
}

ChunkPlan plan_chunks(Index seq_len, const SparseConfig& cfg) {
  validate(cfg);
  if (seq_len < 1) throw InputError("plan_chunks: S must be >= 1");
  ChunkPlan plan;
  plan.seq_len = seq_len;
  plan.blk = cfg.blk;
  plan.requested_chunk_n = cfg.chunk_n;

  if (seq_len < cfg.blk) {
    plan.chunk_n = 1;
    plan.itv = seq_len;
    plan.chunks.push_back({1, 0, seq_len, 0, seq_len});
    return plan;
  }

  Index chunk_n = cfg.chunk_n;
  Index itv = seq_len / chunk_n;
  if (itv < cfg.blk) {
    chunk_n = std::max<Index>(1, seq_len / cfg.blk);
    itv = seq_len / chunk_n;
  }
  plan.chunk_n = chunk_n;
  plan.itv = itv;
  for (Index i = 1; i <= chunk_n; ++i) {
    const Index region_end = (i == chunk_n) ? seq_len : i * itv;
    plan.chunks.push_back({i, i * itv - cfg.blk, i * itv, (i - 1) * itv,
                           region_end});
  }
  return plan;
}

ReducedScores block_reduce(const SampledScores& samples, Index seq_len,
                           Index blk) {
  if (blk < 1 || seq_len < 1) throw InputError("block_reduce: bad S or blk");
  ReducedScores out;
  out.n_blocks = ceil_div(seq_len, blk);
  for (const ChunkSamples& cs : samples.chunks) {
    if (cs.probs.cols() != seq_len)
      throw InputError("block_reduce: sample width does not match S");
    ChunkReduction red;
    red.column.assign(out.n_blocks, 0.0);
    red.slash.assign(out.n_blocks, 0.0);
    for (Index r = 0; r < cs.probs.rows(); ++r) {
      const Index q = cs.rows[r];
      for (Index j = 0; j <= q; ++j) {
        const double p = cs.probs(r, j);
        red.column[j / blk] += p;
        red.slash[(q - j) / blk] += p;
      }
    }
    for (double m : red.column) red.total_mass += m;
    out.chunks.push_back(std::move(red));
  }
  return out;
}

}  // namespace sampattn
