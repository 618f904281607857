/*
 * Copyright (C) 2026 The regflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef REGFLOW_CLI_HPP
#define REGFLOW_CLI_HPP

#include "regflow/calibration.hpp"
#include "regflow/simulation.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace regflow::cli
{

/// Stable exit codes.
inline constexpr int exit_ok        = 0;
inline constexpr int exit_input     = 2;
inline constexpr int exit_numerical = 3;

struct RunManifest {
    SimulationConfig config;
    std::optional<std::filesystem::path> profile_file;
    std::optional<std::filesystem::path> corpus_file;
    std::optional<std::filesystem::path> initial_file;
    std::optional<std::filesystem::path> script_file;
    std::filesystem::path output_dir{"out"};
    std::set<std::string> formats{"csv", "json"};
};

/// Manifest keys (profile_file, corpus_file, initial_file, script_file, output_dir, formats) plus config fields.
RunManifest manifest_from_json(const nlohmann::json& j);

/// Per-agent overrides {"<id>": {"params": {...}, "state": {...}}} on top of the defaults.
InitialConditions initial_from_json(const nlohmann::json& j, const std::vector<ManufacturerProfile>& profiles);

int cmd_simulate(const RunManifest& manifest, std::ostream& out, std::ostream& err);

struct CalibrateArgs {
    std::filesystem::path obs_file;
    std::optional<std::filesystem::path> guess_file;
    std::optional<std::filesystem::path> bounds_file;
    FitOptions options;
    std::filesystem::path output_dir{"out"};
};

int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err);

struct SweepArgs {
    std::optional<std::filesystem::path> params_file;
    std::optional<std::filesystem::path> initial_file;
    std::string parameter;
    std::vector<double> values;
    double horizon{10.0};
    double dt{0.05};
    std::filesystem::path output_dir{"out"};
};

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

struct MetricsArgs {
    std::filesystem::path result_file;
    double epsilon{0.5};
    std::optional<std::string> groups; ///< "tier" or a JSON file mapping agent id -> group name
    std::filesystem::path output_dir{"out"};
};

int cmd_metrics(const MetricsArgs& args, std::ostream& out, std::ostream& err);

int cmd_corpus_print(const std::optional<std::filesystem::path>& corpus_file, std::ostream& out, std::ostream& err);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace regflow::cli

#endif // REGFLOW_CLI_HPP
