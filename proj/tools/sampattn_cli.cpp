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

// Command-line front end: run, tune, sparsity, bench.
//
// Exit codes: 0 success, 1 input error, 2 infeasible tuning, 3 internal
// invariant violation.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sampattn/cra.hpp"
#include "sampattn/filtering.hpp"
#include "sampattn/heatmap.hpp"
#include "sampattn/pipeline.hpp"
#include "sampattn/report.hpp"
#include "sampattn/sparse_exec.hpp"
#include "sampattn/synthetic.hpp"
#include "sampattn/tensor_io.hpp"
#include "sampattn/tuner.hpp"

namespace sa = sampattn;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

std::vector<sa::Index> parse_lengths(const std::string& csv) {
  std::vector<sa::Index> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw sa::InputError("bad length '" + item + "' in --lengths");
    }
  }
  if (out.empty()) throw sa::InputError("--lengths is empty");
  return out;
}

void emit(const sa::Json& j, const std::string& path) {
  if (path.empty())
    std::cout << j.dump(2) << '\n';
  else
    sa::write_json_file(j, path);
}

struct RunArgs {
  std::string input, synthetic, out, heatmap, mask;
  double alpha_c = 0.95, alpha_s = 0.95;
  sa::Index chunks = 1, block = 128, downsample = 1;
  bool oracle = false, no_timings = false;
};

int cmd_run(const RunArgs& a) {
  sa::HeadSet heads;
  std::optional<std::uint64_t> seed;
  if (!a.input.empty() == !a.synthetic.empty())
    throw sa::InputError("run: give exactly one of --input or --synthetic");
  if (!a.input.empty()) {
    heads = sa::load_tensors(a.input);
  } else {
    const sa::SyntheticSpec spec =
        sa::synthetic_spec_from_json(sa::read_json_file(a.synthetic));
    heads = sa::generate_synthetic(spec);
    seed = spec.seed;
  }
  const sa::SparseConfig cfg{a.alpha_c, a.alpha_s, a.chunks, a.block};
  const sa::PipelineResult res = sa::run_pipeline(heads, cfg, a.oracle, seed);
  emit(sa::to_json(res.report, !a.no_timings), a.out);
  if (!a.mask.empty()) {
    std::ofstream os(a.mask);
    if (!os) throw sa::InputError("cannot open " + a.mask);
    for (const auto& m : res.masks) sa::write_block_mask(os, m);
  }
  if (!a.heatmap.empty()) sa::export_heatmap(res.masks.front(), a.heatmap, a.downsample);
  return 0;
}

struct TuneArgs {
  std::string grid, out, lengths;
  std::optional<double> recall_target;
  std::optional<sa::Index> trials;
};

int cmd_tune(const TuneArgs& a) {
  const sa::Json gj = sa::read_json_file(a.grid);
  sa::TuneGrid grid = sa::tune_grid_from_json(gj);
  if (a.recall_target) grid.recall_target = *a.recall_target;
  if (a.trials) grid.trials_per_cell = *a.trials;
  if (!a.lengths.empty()) grid.length_ranges = sa::ranges_from_lengths(parse_lengths(a.lengths));
  sa::validate(grid);
  sa::SyntheticSpec task;
  if (gj.contains("task")) task = sa::synthetic_spec_from_json(gj.at("task"));
  const sa::TuneResult res = sa::tune(grid, task);
  emit(sa::to_json(res, task), a.out);
  for (const auto& r : res.ranges)
    if (!r.feasible)
      std::cerr << "tune: no feasible cell for lengths starting at " << r.range.lo
                << " (recall target " << grid.recall_target << ")\n";
  return res.all_feasible() ? 0 : kExitInfeasible;
}

struct SparsityArgs {
  std::string synthetic, lengths, out;
  double alpha = 0.95;
};

int cmd_sparsity(const SparsityArgs& a) {
  const sa::SyntheticSpec base =
      sa::synthetic_spec_from_json(sa::read_json_file(a.synthetic));
  std::ostringstream csv;
  csv << "seq_len,head,alpha,minimal_mass_fraction,sparsity\n";
  for (sa::Index s : parse_lengths(a.lengths)) {
    sa::SyntheticSpec spec = base;
    spec.seq_len = s;
    const sa::HeadSet heads = sa::generate_synthetic(spec);
    double mean = 0.0;
    for (const auto& h : heads.heads) {
      const double f = sa::minimal_mass_fraction(h, a.alpha);
      mean += f / static_cast<double>(heads.heads.size());
      csv << s << ',' << h.head_id << ',' << a.alpha << ',' << f << ',' << 1.0 - f << '\n';
    }
    csv << s << ",mean," << a.alpha << ',' << mean << ',' << 1.0 - mean << '\n';
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream os(a.out);
    if (!os) throw sa::InputError("cannot open " + a.out);
    os << csv.str();
  }
  return 0;
}

struct BenchArgs {
  std::string synthetic, config, out;
  sa::Index repeat = 1;
};

int cmd_bench(const BenchArgs& a) {
  using Clock = std::chrono::steady_clock;
  const sa::SyntheticSpec spec =
      sa::synthetic_spec_from_json(sa::read_json_file(a.synthetic));
  const sa::TuneResult tuned = sa::tune_result_from_json(sa::read_json_file(a.config));
  const auto cfg = tuned.config_for(spec.seq_len);
  if (!cfg) throw sa::InputError("bench: tuned config has no feasible entry for S=" +
                                 std::to_string(spec.seq_len));
  if (a.repeat < 1) throw sa::InputError("bench: --repeat must be >= 1");
  const sa::HeadSet heads = sa::generate_synthetic(spec);
  const sa::BlockMask full = sa::BlockMask::full_causal(spec.seq_len, cfg->blk);

  double best_dense = 1e300, best_sparse = 1e300, density = 0.0, flops_ratio = 0.0;
  double fs = 0.0, fd = 0.0;
  for (sa::Index r = 0; r < a.repeat; ++r) {
    auto t0 = Clock::now();
    for (const auto& h : heads.heads) (void)sa::sparse_attention(h, full);
    best_dense = std::min(best_dense, std::chrono::duration<double>(Clock::now() - t0).count());

    t0 = Clock::now();
    density = 0.0;
    fs = fd = 0.0;
    for (const auto& h : heads.heads) {
      const sa::HeadPlan hp = sa::build_mask(h, *cfg);
      const sa::SparseResult sr = sa::sparse_attention(h, hp.mask);
      density += sr.flops.block_density / static_cast<double>(heads.heads.size());
      fs += sr.flops.flops_sparse;
      fd += sr.flops.flops_dense;
    }
    best_sparse = std::min(best_sparse, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  flops_ratio = fs / fd;
  sa::Json j;
  j["seq_len"] = spec.seq_len;
  j["head_dim"] = spec.head_dim;
  j["n_heads"] = spec.n_heads;
  j["alpha_c"] = cfg->alpha_c;
  j["alpha_s"] = cfg->alpha_s;
  j["chunk_n"] = cfg->chunk_n;
  j["blk"] = cfg->blk;
  j["repeat"] = a.repeat;
  j["block_density_mean"] = density;
  j["flops_ratio"] = flops_ratio;
  j["time_dense_s"] = best_dense;
  j["time_sparse_s"] = best_sparse;
  j["speedup"] = best_dense / best_sparse;
  emit(j, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled block-sparse attention: mask estimation, execution and tuning"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Estimate masks and run block-sparse attention");
  run_cmd->add_option("--input", run.input, "Q/K/V tensor file");
  run_cmd->add_option("--synthetic", run.synthetic, "Synthetic spec (JSON)");
  run_cmd->add_option("--alpha-c", run.alpha_c, "Column CRA threshold");
  run_cmd->add_option("--alpha-s", run.alpha_s, "Slash CRA threshold");
  run_cmd->add_option("--chunks", run.chunks, "Number of sampling chunks");
  run_cmd->add_option("--block", run.block, "Block size");
  run_cmd->add_flag("--oracle", run.oracle, "Compute dense-oracle metrics");
  run_cmd->add_option("--out", run.out, "Metrics JSON path (default stdout)");
  run_cmd->add_option("--heatmap", run.heatmap, "PGM of head 0's block mask");
  run_cmd->add_option("--heatmap-downsample", run.downsample, "Max-pool factor");
  run_cmd->add_option("--mask", run.mask, "Write block masks (all heads)");
  run_cmd->add_flag("--no-timings", run.no_timings, "Omit wall-clock fields");

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Grid-search thresholds per length range");
  tune_cmd->add_option("--grid", tune.grid, "Grid file (JSON)")->required();
  tune_cmd->add_option("--recall-target", tune.recall_target, "CRA floor");
  tune_cmd->add_option("--lengths", tune.lengths, "Range starts, e.g. 1024,4096,16384");
  tune_cmd->add_option("--trials", tune.trials, "Trials per cell");
  tune_cmd->add_option("--out", tune.out, "Output JSON path (default stdout)");

  SparsityArgs sp;
  auto* sp_cmd = app.add_subcommand("sparsity", "Minimal row-wise mass fraction table");
  sp_cmd->add_option("--synthetic", sp.synthetic, "Synthetic spec (JSON)")->required();
  sp_cmd->add_option("--alpha", sp.alpha, "Mass threshold");
  sp_cmd->add_option("--lengths", sp.lengths, "Sequence lengths")->required();
  sp_cmd->add_option("--out", sp.out, "CSV path (default stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Dense vs sparse wall time and FLOP ratio");
  bench_cmd->add_option("--synthetic", bench.synthetic, "Synthetic spec (JSON)")->required();
  bench_cmd->add_option("--config", bench.config, "Tuned JSON from 'tune'")->required();
  bench_cmd->add_option("--repeat", bench.repeat, "Repetitions (best time kept)");
  bench_cmd->add_option("--out", bench.out, "Output JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*tune_cmd) return cmd_tune(tune);
    if (*sp_cmd) return cmd_sparsity(sp);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const sa::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const sa::GeneratorError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const sa::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
