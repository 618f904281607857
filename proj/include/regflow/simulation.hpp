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
#ifndef REGFLOW_SIMULATION_HPP
#define REGFLOW_SIMULATION_HPP

#include "regflow/agents.hpp"
#include "regflow/brr.hpp"
#include "regflow/calibration.hpp"
#include "regflow/corpus.hpp"
#include "regflow/dynamics.hpp"
#include "regflow/llm_policy.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace regflow
{

enum class PolicyKind { rule, scripted, llm };

std::string_view to_string(PolicyKind k);
std::optional<PolicyKind> parse_policy_kind(std::string_view text);

struct SimulationConfig {
    int total_steps{73};
    double dt_per_step{0.05};
    int inner_substeps{20};
    Schedule schedule;
    ThresholdConfig threshold_cfg;
    ParameterBounds param_bounds{ParameterBounds::defaults()};
    double max_step{default_max_step};
    std::uint64_t seed{0};
    PolicyKind policy_kind{PolicyKind::rule};
    LlmClientConfig llm;
    bool record_substates{false}; ///< keep the RK4 substep states of every agent
};

void validate(const SimulationConfig& cfg);

struct AgentInit {
    ModelParameters params;
    SystemState state;
};

using InitialConditions = std::map<std::string, AgentInit>;

/// Coefficients shipped as the baseline for simulation and sensitivity runs.
ModelParameters default_parameters();

/// Baseline starting state: g = 1, c = 0.5, m = 0.2 at t = 0.
SystemState default_initial_state();

/// default_parameters() for every profile, with starting c and m graded by tier and AI investment.
InitialConditions default_initial_conditions(const std::vector<ManufacturerProfile>& profiles);

struct AgentStepEntry {
    std::string agent_id;
    ModelParameters params; ///< after this step's adjustments
    SystemState state;      ///< at the end of the step
    double f{0};
    AgentDecision decision;
    std::optional<double> brr;
    std::optional<bool> approved;
    double compliance_cost{0};
    double market_adaptation{0};
    FailureKind fallback{FailureKind::none};
    std::vector<SystemState> substates; ///< start plus every substep end, when recorded
};

struct StepRecord {
    int step{0};
    Strictness phase{Strictness::strict};
    std::vector<std::string> regulation_ids;
    std::vector<AgentStepEntry> agents; ///< ascending agent id
    double threshold{0};                ///< threshold the step's submissions were judged against
    double next_threshold{0};
    double mean_feedback{0};
    int approvals{0};
};

struct SimulationResult {
    SimulationConfig config;
    std::vector<ManufacturerProfile> profiles;
    std::vector<StepRecord> records;
    std::size_t clamp_events{0};
    std::size_t llm_fallbacks{0};
};

/// decisions[step][agent_id]
using DecisionScript = std::vector<std::map<std::string, AgentDecision>>;

/**
 * Runs the regulator/manufacturer loop for config.total_steps steps.
 *
 * Per step: issue the active regulations, let every agent decide, apply the
 * bounded adjustments, advance each agent's own ODE state by dt_per_step in
 * inner_substeps RK4 substeps, judge submissions against the current threshold,
 * then update the threshold once from the rolling BRR history.
 */
SimulationResult run(const SimulationConfig& config, const std::vector<ManufacturerProfile>& profiles,
                     const InitialConditions& initial, const Corpus& corpus);

/// As run, with every decision taken from script.
SimulationResult run_scripted(const SimulationConfig& config, const std::vector<ManufacturerProfile>& profiles,
                              const InitialConditions& initial, const Corpus& corpus, const DecisionScript& script);

/// The decisions recorded in a result, suitable for run_scripted.
DecisionScript extract_script(const SimulationResult& result);

/// beta2 * c / (1 + gamma1 * m), the compliance damping rate integrated into compliance_cost.
double compliance_cost_rate(const SystemState& s, const ModelParameters& p);

} // namespace regflow

#endif // REGFLOW_SIMULATION_HPP
