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

#include "sampattn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "sampattn/cra.hpp"
#include "sampattn/filtering.hpp"

namespace sampattn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kConservationTolerance = 1e-6;

void check_invariants(const ReducedScores& reduced, const BlockMask& mask,
                      const SparseConfig& cfg) {
  for (std::size_t c = 0; c < reduced.chunks.size(); ++c) {
    const ChunkReduction& red = reduced.chunks[c];
    double slash_total = 0.0;
    for (double v : red.slash) slash_total += v;
    if (std::abs(slash_total - red.total_mass) > kConservationTolerance) {
      std::ostringstream os;
      os << "chunk " << c << ": column mass " << red.total_mass
         << " != slash mass " << slash_total;
      throw InvariantError(os.str());
    }
    const ChunkSelection& sel = mask.provenance->chunks[c];
    if (sel.column_retained < cfg.alpha_c * sel.column_total ||
        sel.slash_retained < cfg.alpha_s * sel.slash_total)
      throw InvariantError("chunk " + std::to_string(c) +
                           ": selection misses its CRA threshold");
  }
  if (!mask.has_diagonal())
    throw InvariantError("merged mask lacks a diagonal block");
}

}  // namespace

HeadPlan build_mask(const Head& head, const SparseConfig& cfg) {
  HeadPlan hp;
  hp.plan = plan_chunks(head.seq_len(), cfg);
  hp.samples = sample_scores(head, hp.plan);
  hp.reduced = block_reduce(hp.samples, head.seq_len(), cfg.blk);
  hp.mask = select_and_merge(hp.reduced, hp.plan, cfg);
  check_invariants(hp.reduced, hp.mask, cfg);
  return hp;
}

double sampled_cra(const SampledScores& samples, const BlockMask& mask) {
  double worst = 1.0;
  bool any = false;
  const Index blk = mask.blk();
  for (const ChunkSamples& cs : samples.chunks) {
    for (std::size_t r = 0; r < cs.rows.size(); ++r) {
      const Index q = cs.rows[r];
      const Index qb = q / blk;
      double kept = 0.0;
      for (Index kb : mask.row(qb)) {
        const Index end = std::min(mask.block_begin(kb) + mask.block_size(kb), q + 1);
        for (Index j = mask.block_begin(kb); j < end; ++j) kept += cs.probs(r, j);
      }
      worst = any ? std::min(worst, kept) : kept;
      any = true;
    }
  }
  return worst;
}

PipelineResult run_pipeline(const HeadSet& heads, const SparseConfig& cfg,
                            bool want_oracle,
                            std::optional<std::uint64_t> seed) {
  validate(heads);
  validate(cfg);
  PipelineResult out;
  MetricsReport& rep = out.report;
  rep.config = cfg;
  rep.seq_len = heads.seq_len;
  rep.head_dim = heads.head_dim;
  rep.seed = seed;
  rep.oracle = want_oracle && heads.seq_len <= kOracleCap;
  rep.cra_basis = rep.oracle ? "full" : "sampled";

  for (const Head& head : heads.heads) {
    HeadMetrics hm;
    hm.head_id = head.head_id;

    auto t0 = Clock::now();
    ChunkPlan plan = plan_chunks(head.seq_len(), cfg);
    SampledScores samples = sample_scores(head, plan);
    ReducedScores reduced = block_reduce(samples, head.seq_len(), cfg.blk);
    hm.time_sampling = seconds_since(t0);

    t0 = Clock::now();
    BlockMask mask = select_and_merge(reduced, plan, cfg);
    hm.time_filtering = seconds_since(t0);
    check_invariants(reduced, mask, cfg);

    t0 = Clock::now();
    SparseResult sparse = sparse_attention(head, mask);
    hm.time_sparse = seconds_since(t0);
    if (sparse.touched_blocks != mask.active_count())
      throw InvariantError("executor touched " +
                           std::to_string(sparse.touched_blocks) +
                           " blocks, mask has " +
                           std::to_string(mask.active_count()));

    rep.effective_chunk_n = plan.chunk_n;
    for (const ChunkSelection& sel : mask.provenance->chunks) {
      hm.k_c.push_back(sel.k_c);
      hm.k_s.push_back(sel.k_s);
    }
    hm.cra_sampled = sampled_cra(samples, mask);
    hm.sparsity_ratio = sparsity_ratio(mask);
    hm.block_density = sparse.flops.block_density;
    hm.active_blocks = sparse.flops.active_blocks;
    hm.causal_blocks = sparse.flops.causal_blocks;
    hm.touched_blocks = sparse.touched_blocks;
    hm.flops_sparse = sparse.flops.flops_sparse;
    hm.flops_dense = sparse.flops.flops_dense;
    hm.flops_ratio = hm.flops_sparse / hm.flops_dense;

    if (rep.oracle) {
      t0 = Clock::now();
      const MatrixXd dense = dense_causal_attention(head);
      hm.time_dense = seconds_since(t0);
      const CraResult cra = cra_of_block_mask(head, mask);
      hm.cra_full = cra.cra;
      hm.cra_full_mean = cra.mean_retained;
      hm.output_error = output_error(sparse.output, dense);
    }

    out.masks.push_back(std::move(mask));
    out.outputs.push_back(std::move(sparse.output));
    rep.heads.push_back(std::move(hm));
  }

  const double n = static_cast<double>(rep.heads.size());
  rep.cra_full_min = 1.0;
  rep.cra_sampled_min = 1.0;
  for (const HeadMetrics& hm : rep.heads) {
    if (hm.cra_full) {
      rep.cra_full_min = std::min(rep.cra_full_min, *hm.cra_full);
      rep.cra_full_mean += *hm.cra_full_mean / n;
      rep.output_error_max = std::max(rep.output_error_max, *hm.output_error);
    }
    rep.cra_sampled_min = std::min(rep.cra_sampled_min, hm.cra_sampled);
    rep.sparsity_ratio_mean += hm.sparsity_ratio / n;
    rep.block_density_mean += hm.block_density / n;
    rep.flops_sparse_total += hm.flops_sparse;
    rep.flops_dense_total += hm.flops_dense;
    rep.time_sparse_total += hm.time_sampling + hm.time_filtering + hm.time_sparse;
    rep.time_dense_total += hm.time_dense;
  }
  rep.flops_ratio = rep.flops_sparse_total / rep.flops_dense_total;
  if (!rep.oracle) rep.cra_full_min = 0.0;
  return out;
}

}  // namespace sampattn
