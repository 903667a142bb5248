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

#include "sampattn/report.hpp"

#include <fstream>

namespace sampattn {

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InputError(std::string("key '") + key + "': " + e.what());
  }
}

std::vector<PlantedPattern> patterns_from_json(const Json& j, const char* key) {
  std::vector<PlantedPattern> out;
  if (!j.contains(key)) return out;
  const Json& arr = j.at(key);
  if (!arr.is_array()) throw InputError(std::string("'") + key + "' must be a list");
  for (const Json& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number())
      throw InputError(std::string("'") + key + "' entries must be [position, mass]");
    out.push_back({e[0].get<Index>(), e[1].get<double>()});
  }
  return out;
}

Json patterns_to_json(const std::vector<PlantedPattern>& ps) {
  Json arr = Json::array();
  for (const auto& p : ps) arr.push_back(Json::array({p.where, p.mass}));
  return arr;
}

Json head_to_json(const HeadMetrics& h, bool timings) {
  Json j;
  j["head_id"] = h.head_id;
  if (h.cra_full) {
    j["cra_full"] = *h.cra_full;
    j["cra_full_mean"] = *h.cra_full_mean;
  }
  j["cra_sampled"] = h.cra_sampled;
  j["sparsity_ratio"] = h.sparsity_ratio;
  j["block_density"] = h.block_density;
  if (h.output_error) j["output_error"] = *h.output_error;
  j["active_blocks"] = h.active_blocks;
  j["causal_blocks"] = h.causal_blocks;
  j["touched_blocks"] = h.touched_blocks;
  j["flops_sparse"] = h.flops_sparse;
  j["flops_dense"] = h.flops_dense;
  j["flops_ratio"] = h.flops_ratio;
  j["k_c"] = h.k_c;
  j["k_s"] = h.k_s;
  if (timings) {
    j["time_sampling_s"] = h.time_sampling;
    j["time_filtering_s"] = h.time_filtering;
    j["time_sparse_s"] = h.time_sparse;
    if (h.cra_full) j["time_dense_s"] = h.time_dense;
  }
  return j;
}

}  // namespace

Json to_json(const MetricsReport& r, bool include_timings) {
  Json j;
  j["alpha_c"] = r.config.alpha_c;
  j["alpha_s"] = r.config.alpha_s;
  j["chunk_n"] = r.config.chunk_n;
  j["effective_chunk_n"] = r.effective_chunk_n;
  j["blk"] = r.config.blk;
  j["seq_len"] = r.seq_len;
  j["head_dim"] = r.head_dim;
  j["n_heads"] = r.heads.size();
  if (r.seed) j["seed"] = *r.seed;
  j["oracle"] = r.oracle;
  j["cra_basis"] = r.cra_basis;
  if (r.oracle) {
    j["cra_full_min"] = r.cra_full_min;
    j["cra_full_mean"] = r.cra_full_mean;
    j["output_error_max"] = r.output_error_max;
  } else {
    j["oracle_note"] = "full-P metrics skipped (not requested or S > " +
                       std::to_string(kOracleCap) + ")";
  }
  j["cra_sampled_min"] = r.cra_sampled_min;
  j["sparsity_ratio_mean"] = r.sparsity_ratio_mean;
  j["block_density_mean"] = r.block_density_mean;
  j["flops_sparse"] = r.flops_sparse_total;
  j["flops_dense"] = r.flops_dense_total;
  j["flops_ratio"] = r.flops_ratio;
  if (include_timings) {
    j["time_sparse_s"] = r.time_sparse_total;
    if (r.oracle) j["time_dense_s"] = r.time_dense_total;
  }
  Json heads = Json::array();
  for (const auto& h : r.heads) heads.push_back(head_to_json(h, include_timings));
  j["heads"] = std::move(heads);
  return j;
}

Json to_json(const SyntheticSpec& s) {
  Json j;
  j["seq_len"] = s.seq_len;
  j["head_dim"] = s.head_dim;
  j["n_heads"] = s.n_heads;
  j["sink_columns"] = patterns_to_json(s.sinks);
  j["slash_offsets"] = patterns_to_json(s.slashes);
  j["noise_scale"] = s.noise_scale;
  j["seed"] = s.seed;
  return j;
}

SyntheticSpec synthetic_spec_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("synthetic spec must be a JSON object");
  SyntheticSpec s;
  s.seq_len = get_or<Index>(j, "seq_len", s.seq_len);
  s.head_dim = get_or<Index>(j, "head_dim", s.head_dim);
  s.n_heads = get_or<Index>(j, "n_heads", s.n_heads);
  s.sinks = patterns_from_json(j, "sink_columns");
  s.slashes = patterns_from_json(j, "slash_offsets");
  s.noise_scale = get_or<double>(j, "noise_scale", s.noise_scale);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  validate(s);
  return s;
}

TuneGrid tune_grid_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("grid must be a JSON object");
  TuneGrid g;
  g.alphas_c = get_or(j, "alphas_c", g.alphas_c);
  g.alphas_s = get_or(j, "alphas_s", g.alphas_s);
  g.chunk_ns = get_or(j, "chunk_ns", g.chunk_ns);
  g.recall_target = get_or(j, "recall_target", g.recall_target);
  g.trials_per_cell = get_or(j, "trials_per_cell", g.trials_per_cell);
  g.blk = get_or(j, "blk", g.blk);
  if (j.contains("lengths"))
    g.length_ranges = ranges_from_lengths(get_or<std::vector<Index>>(j, "lengths", {}));
  validate(g);
  return g;
}

Json to_json(const TuneGrid& g) {
  Json j;
  j["alphas_c"] = g.alphas_c;
  j["alphas_s"] = g.alphas_s;
  j["chunk_ns"] = g.chunk_ns;
  std::vector<Index> lengths;
  for (const auto& r : g.length_ranges) lengths.push_back(r.lo);
  j["lengths"] = lengths;
  j["recall_target"] = g.recall_target;
  j["trials_per_cell"] = g.trials_per_cell;
  j["blk"] = g.blk;
  return j;
}

namespace {

Json cell_to_json(const TuneCell& c) {
  Json j;
  j["alpha_c"] = c.alpha_c;
  j["alpha_s"] = c.alpha_s;
  j["chunk_n"] = c.chunk_n;
  j["effective_chunk_n"] = c.effective_chunk_n;
  j["mean_cra"] = c.mean_cra;
  j["mean_block_density"] = c.mean_density;
  j["feasible"] = c.feasible;
  return j;
}

TuneCell cell_from_json(const Json& j, std::size_t range) {
  TuneCell c;
  c.range = range;
  c.alpha_c = j.at("alpha_c").get<double>();
  c.alpha_s = j.at("alpha_s").get<double>();
  c.chunk_n = j.at("chunk_n").get<Index>();
  c.effective_chunk_n = get_or<Index>(j, "effective_chunk_n", c.chunk_n);
  c.mean_cra = get_or<double>(j, "mean_cra", 0.0);
  c.mean_density = get_or<double>(j, "mean_block_density", 0.0);
  c.feasible = get_or<bool>(j, "feasible", true);
  return c;
}

}  // namespace

Json to_json(const TuneResult& r, const SyntheticSpec& task) {
  Json j;
  j["recall_target"] = r.recall_target;
  j["accuracy_metric"] =
      "mean over trials and heads of CRA (min over rows); dense-P basis up to S=" +
      std::to_string(kOracleCap) + ", sampled rows beyond";
  j["task"] = to_json(task);
  Json ranges = Json::array();
  for (std::size_t i = 0; i < r.ranges.size(); ++i) {
    const RangeChoice& rc = r.ranges[i];
    Json e;
    e["lo"] = rc.range.lo;
    if (rc.range.hi != std::numeric_limits<Index>::max()) e["hi"] = rc.range.hi;
    e["task_seq_len"] = rc.task_seq_len;
    e["cra_basis"] = rc.cra_basis;
    e["feasible"] = rc.feasible;
    if (rc.best) e["best"] = cell_to_json(*rc.best);
    Json cells = Json::array();
    for (const TuneCell& c : r.cells)
      if (c.range == i) cells.push_back(cell_to_json(c));
    e["grid"] = std::move(cells);
    ranges.push_back(std::move(e));
  }
  j["ranges"] = std::move(ranges);
  return j;
}

TuneResult tune_result_from_json(const Json& j) {
  try {
    TuneResult r;
    r.recall_target = get_or<double>(j, "recall_target", 0.0);
    const Json& ranges = j.at("ranges");
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      const Json& e = ranges[i];
      RangeChoice rc;
      rc.range.lo = e.at("lo").get<Index>();
      if (e.contains("hi")) rc.range.hi = e.at("hi").get<Index>();
      rc.task_seq_len = get_or<Index>(e, "task_seq_len", rc.range.lo);
      rc.cra_basis = get_or<std::string>(e, "cra_basis", "full");
      rc.feasible = get_or<bool>(e, "feasible", false);
      if (e.contains("best")) rc.best = cell_from_json(e.at("best"), i);
      if (e.contains("grid"))
        for (const Json& c : e.at("grid")) r.cells.push_back(cell_from_json(c, i));
      r.ranges.push_back(rc);
    }
    return r;
  } catch (const Json::exception& e) {
    throw InputError(std::string("tuned config: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(is);
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

}  // namespace sampattn
