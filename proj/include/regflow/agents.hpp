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
#ifndef REGFLOW_AGENTS_HPP
#define REGFLOW_AGENTS_HPP

#include "regflow/brr.hpp"
#include "regflow/calibration.hpp"
#include "regflow/corpus.hpp"
#include "regflow/dynamics.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace regflow
{

enum class ResourceTier { limited, medium, rich };
enum class RiskPreference { low, medium, high };

std::string_view to_string(ResourceTier t);
std::string_view to_string(RiskPreference r);
std::optional<ResourceTier> parse_resource_tier(std::string_view text);
std::optional<RiskPreference> parse_risk_preference(std::string_view text);

/// 0, 1, 2 for limited, medium, rich.
int tier_index(ResourceTier t);

struct ManufacturerProfile {
    std::string id;
    std::string name;
    ResourceTier resource_tier{ResourceTier::medium};
    RiskPreference risk_preference{RiskPreference::medium};
    double ai_investment_fraction{0.0};
    std::string focus;

    friend bool operator==(const ManufacturerProfile&, const ManufacturerProfile&) = default;
};

void validate(const ManufacturerProfile& p);

/// Companies A-J: A, B, J rich; E, F, G medium; C, D, H, I limited.
std::vector<ManufacturerProfile> default_profiles();

inline constexpr double default_max_step = 0.05;

/// Per-coefficient deltas keyed by coefficient name.
struct ParameterAdjustment {
    std::map<std::string, double> deltas;

    friend bool operator==(const ParameterAdjustment&, const ParameterAdjustment&) = default;
};

struct AgentDecision {
    bool comply{false};
    ParameterAdjustment adjustments;
    std::optional<Submission> submission; ///< present iff comply
    std::string rationale;

    friend bool operator==(const AgentDecision&, const AgentDecision&) = default;
};

/// Throws ArgumentError if the decision breaks its invariants for this agent.
void validate(const AgentDecision& d, std::string_view agent_id, double max_step);

/// What a policy sees of one agent at the start of a step.
struct PolicyContext {
    SystemState state;
    ModelParameters params;
    double threshold{4.0};
    bool last_approved{true};
    double max_step{default_max_step};
};

/**
 * Deterministic rule-based policy.
 *
 * With tier factor r = 0.5 / 1.0 / 1.5: strict regulations push alpha2 and phi2
 * up and beta2 down, lenient ones push alpha3 up and beta3 down, and a rejected
 * last submission adds to alpha2. Always complies. Scores follow tier, phase,
 * AI investment and risk preference.
 */
AgentDecision rule_policy_decide(const ManufacturerProfile& profile, const std::vector<Regulation>& regulations,
                                 const PolicyContext& ctx);

/// Sets each named coefficient to clip(old + delta, lo, hi); throws ArgumentError on unknown names.
ModelParameters apply_adjustments(const ModelParameters& p, const ParameterAdjustment& adj,
                                  const ParameterBounds& bounds);

/// Clips every delta into [-max_step, max_step]. Returns true if anything changed.
bool clip_deltas(ParameterAdjustment& adj, double max_step);

std::string render_prompt(const ManufacturerProfile& profile, const std::vector<Regulation>& regulations,
                          const PolicyContext& ctx);

struct ReplyParse {
    std::optional<AgentDecision> decision;
    bool clipped{false}; ///< a score or delta was out of range and clipped
    std::string error;   ///< set when decision is empty

    explicit operator bool() const noexcept
    {
        return decision.has_value();
    }
};

/**
 * Parses the flat JSON reply grammar
 * {"comply", "adjustments", "safety", "effectiveness", "compliance", "adverse", "rationale"}.
 * A surrounding markdown code fence is tolerated.
 */
ReplyParse parse_llm_reply(std::string_view text, const std::string& agent_id,
                           const std::vector<Regulation>& regulations, double max_step = default_max_step);

} // namespace regflow

#endif // REGFLOW_AGENTS_HPP
