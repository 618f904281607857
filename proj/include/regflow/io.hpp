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
#ifndef REGFLOW_IO_HPP
#define REGFLOW_IO_HPP

#include "regflow/agents.hpp"
#include "regflow/analysis.hpp"
#include "regflow/calibration.hpp"
#include "regflow/corpus.hpp"
#include "regflow/simulation.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace regflow
{

using nlohmann::json;

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

// ---- CSV ------------------------------------------------------------------

/// Header t,G,C,M,F; one row per sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Header t,G,C,M,F.
void write_observed_csv(std::ostream& os, const ObservedSeries& obs);

/// Throws ArgumentError on a malformed or empty file.
ObservedSeries read_observed_csv(std::istream& is);

/// Header step,agent,G,C,M,F,brr,approved,threshold,cost,adaptation; brr/approved empty without submission.
void write_simulation_csv(std::ostream& os, const SimulationResult& result);

/// Header parameter,value,G,C,M,F,rate_G,rate_C,rate_M,rate_F; undefined rates written as "undefined".
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

// ---- JSON -----------------------------------------------------------------

json to_json(const ModelParameters& p);
/// Fields absent from j keep their value in defaults; unknown names throw ArgumentError.
ModelParameters parameters_from_json(const json& j, const ModelParameters& defaults = {});

json to_json(const SystemState& s);
SystemState state_from_json(const json& j, const SystemState& defaults = {});

json to_json(const ParameterBounds& b);
/// Accepts {"name": [lo, hi], ...}; unnamed fields keep defaults.
ParameterBounds bounds_from_json(const json& j, const ParameterBounds& defaults = ParameterBounds::defaults());

json to_json(const FitResult& r);

json to_json(const Regulation& r);
Regulation regulation_from_json(const json& j);
json to_json(const Corpus& c);
Corpus corpus_from_json(const json& j);

json to_json(const ManufacturerProfile& p);
ManufacturerProfile profile_from_json(const json& j);
std::vector<ManufacturerProfile> profiles_from_json(const json& j);

json to_json(const Submission& s);
Submission submission_from_json(const json& j);
json to_json(const AgentDecision& d);
AgentDecision decision_from_json(const json& j);

json to_json(const SimulationConfig& c);
/// Every field optional; missing fields take SimulationConfig defaults.
SimulationConfig config_from_json(const json& j);

json to_json(const SimulationResult& r);
SimulationResult result_from_json(const json& j);

json to_json(const DecisionScript& s);
DecisionScript script_from_json(const json& j);

json to_json(const MetricsReport& m);
json to_json(const WelchAnovaResult& w);

// ---- files ----------------------------------------------------------------

/// Throws ArgumentError if the file is missing or not valid JSON.
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
/// Pretty-printed with a trailing newline.
std::string dump(const json& j);

} // namespace regflow

#endif // REGFLOW_IO_HPP
