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

// JSON forms of reports, synthetic specs, tuning grids and tuning results.

#include <filesystem>

#include "json.hpp"
#include "sampattn/pipeline.hpp"
#include "sampattn/synthetic.hpp"
#include "sampattn/tuner.hpp"

namespace sampattn {

using Json = nlohmann::ordered_json;

/// Timings are wall-clock and vary run to run; leave them out for
/// reproducible output.
Json to_json(const MetricsReport& report, bool include_timings);

Json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const Json& j);

/// Grid files may embed the task template under "task".
TuneGrid tune_grid_from_json(const Json& j);
Json to_json(const TuneGrid& grid);

Json to_json(const TuneResult& result, const SyntheticSpec& task);
TuneResult tune_result_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

}  // namespace sampattn
