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
#include "regflow/simulation.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <set>

namespace regflow
{

std::string_view to_string(PolicyKind k)
{
    switch (k) {
    case PolicyKind::rule:
        return "rule";
    case PolicyKind::scripted:
        return "scripted";
    case PolicyKind::llm:
        return "llm";
    }
    return "rule";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view text)
{
    for (auto k : {PolicyKind::rule, PolicyKind::scripted, PolicyKind::llm}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    return std::nullopt;
}

void validate(const SimulationConfig& cfg)
{
    if (cfg.total_steps < 1 || cfg.inner_substeps < 1) {
        throw ArgumentError("total_steps and inner_substeps must be >= 1");
    }
    if (!(cfg.dt_per_step > 0.0) || !std::isfinite(cfg.dt_per_step)) {
        throw ArgumentError("dt_per_step must be positive and finite");
    }
    if (!(cfg.max_step > 0.0) || !std::isfinite(cfg.max_step)) {
        throw ArgumentError("max_step must be positive and finite");
    }
    if (cfg.llm.concurrency < 1) {
        throw ArgumentError("llm concurrency must be >= 1");
    }
    if (cfg.policy_kind == PolicyKind::llm && cfg.llm.endpoint.rfind("http://", 0) != 0) {
        throw ArgumentError("llm endpoint must be a plain http:// URL, got '" + cfg.llm.endpoint + "'");
    }
    validate(cfg.schedule);
    validate(cfg.threshold_cfg);
    validate(cfg.param_bounds);
}

ModelParameters default_parameters()
{
    ModelParameters p;
    p.alpha1 = 0.5;
    p.alpha2 = 0.4;
    p.alpha3 = 0.6;
    p.alpha4 = 0.5;
    p.phi1   = 0.3;
    p.phi2   = 0.5;
    p.phi3   = 0.4;
    p.phi4   = 0.6;
    p.beta1  = 0.2;
    p.beta2  = 0.3;
    p.beta3  = 0.1;
    p.gamma1 = 0.2;
    p.gamma2 = 0.3;
    return p;
}

SystemState default_initial_state()
{
    return {0.0, 1.0, 0.5, 0.2};
}

InitialConditions default_initial_conditions(const std::vector<ManufacturerProfile>& profiles)
{
    InitialConditions out;
    for (const auto& prof : profiles) {
        const double tier = tier_index(prof.resource_tier);
        SystemState s     = default_initial_state();
        s.c               = 0.3 + 0.25 * tier + prof.ai_investment_fraction;
        s.m               = 0.1 + 0.15 * tier + 0.5 * prof.ai_investment_fraction;
        out[prof.id]      = {default_parameters(), s};
    }
    return out;
}

double compliance_cost_rate(const SystemState& s, const ModelParameters& p)
{
    return p.beta2 * (s.c / (1.0 + p.gamma1 * s.m));
}

namespace
{

struct AgentRuntime {
    const ManufacturerProfile* profile{nullptr};
    ModelParameters params;
    SystemState state;
    bool last_approved{true};
};

struct PolicyResult {
    AgentDecision decision;
    FailureKind fallback{FailureKind::none};
};

using DecisionProvider = std::function<std::vector<PolicyResult>(int step, const std::vector<Regulation>&,
                                                                 const std::vector<AgentRuntime>&, double threshold)>;

PolicyContext context_for(const AgentRuntime& a, double threshold, double max_step)
{
    return {a.state, a.params, threshold, a.last_approved, max_step};
}

std::vector<AgentRuntime> prepare_agents(const std::vector<ManufacturerProfile>& profiles,
                                         const InitialConditions& initial)
{
    if (profiles.empty()) {
        throw ArgumentError("simulation needs at least one manufacturer profile");
    }
    std::set<std::string> ids;
    for (const auto& p : profiles) {
        validate(p);
        if (!ids.insert(p.id).second) {
            throw ArgumentError("duplicate profile id '" + p.id + "'");
        }
        if (!initial.contains(p.id)) {
            throw ArgumentError("no initial conditions for agent '" + p.id + "'");
        }
    }
    if (initial.size() != profiles.size()) {
        throw ArgumentError("initial conditions name agents without a profile");
    }

    std::vector<AgentRuntime> agents;
    for (const auto& p : profiles) {
        const auto& init = initial.at(p.id);
        validate(init.params);
        validate(init.state);
        agents.push_back({&p, init.params, init.state, true});
    }
    std::sort(agents.begin(), agents.end(),
              [](const AgentRuntime& a, const AgentRuntime& b) { return a.profile->id < b.profile->id; });
    return agents;
}

SimulationResult run_loop(const SimulationConfig& config, const std::vector<ManufacturerProfile>& profiles,
                          const InitialConditions& initial, const Corpus& corpus, const DecisionProvider& provider)
{
    validate(config);
    validate(corpus);
    std::vector<AgentRuntime> agents = prepare_agents(profiles, initial);

    SimulationResult result;
    result.config   = config;
    result.profiles = profiles;
    std::sort(result.profiles.begin(), result.profiles.end(),
              [](const ManufacturerProfile& a, const ManufacturerProfile& b) { return a.id < b.id; });
    result.records.reserve(static_cast<std::size_t>(config.total_steps));

    const double h      = config.dt_per_step / config.inner_substeps;
    const auto window   = static_cast<std::size_t>(config.threshold_cfg.window);
    std::vector<double> history;
    double threshold = update_threshold(config.threshold_cfg, history);

    for (int step = 0; step < config.total_steps; ++step) {
        StepRecord rec;
        rec.step      = step;
        rec.phase     = active_phase(step, config.schedule);
        rec.threshold = threshold;
        const std::vector<Regulation> regs = regulations_for(step, corpus, config.schedule);
        for (const auto& r : regs) {
            rec.regulation_ids.push_back(r.id);
        }

        std::vector<PolicyResult> decisions = provider(step, regs, agents, threshold);

        std::vector<double> step_brrs;
        double feedback_sum = 0.0;
        for (std::size_t i = 0; i < agents.size(); ++i) {
            AgentRuntime& a = agents[i];
            AgentStepEntry entry;
            entry.agent_id = a.profile->id;
            entry.fallback = decisions[i].fallback;
            entry.decision = std::move(decisions[i].decision);
            validate(entry.decision, a.profile->id, config.max_step);

            a.params = apply_adjustments(a.params, entry.decision.adjustments, config.param_bounds);

            double cost = 0.0;
            if (config.record_substates) {
                entry.substates.push_back(a.state);
            }
            for (int k = 0; k < config.inner_substeps; ++k) {
                const double q0   = compliance_cost_rate(a.state, a.params);
                SystemState next;
                try {
                    next = step_rk4(a.state, a.params, h, result.clamp_events);
                }
                catch (const DomainError& e) {
                    throw NumericalError(static_cast<std::size_t>(step),
                                         "agent '" + a.profile->id + "': " + e.what());
                }
                next.t  = a.state.t + h;
                cost   += 0.5 * h * (q0 + compliance_cost_rate(next, a.params));
                a.state = next;
                if (config.record_substates) {
                    entry.substates.push_back(a.state);
                }
            }

            entry.params            = a.params;
            entry.state             = a.state;
            entry.f                 = eval_feedback(a.state, a.params);
            entry.compliance_cost   = cost;
            entry.market_adaptation = a.state.m;
            feedback_sum += entry.f;
            if (entry.fallback != FailureKind::none) {
                ++result.llm_fallbacks;
            }

            if (entry.decision.comply) {
                const double brr       = compute_brr(*entry.decision.submission);
                const BRRDecision verdict = decide(brr, threshold);
                entry.brr             = brr;
                entry.approved        = verdict.approved;
                a.last_approved       = verdict.approved;
                rec.approvals += verdict.approved ? 1 : 0;
                step_brrs.push_back(brr);
            }
            else {
                a.last_approved = false;
            }
            rec.agents.push_back(std::move(entry));
        }

        history.insert(history.end(), step_brrs.begin(), step_brrs.end());
        if (history.size() > window) {
            history.erase(history.begin(), history.end() - static_cast<std::ptrdiff_t>(window));
        }
        threshold          = update_threshold(config.threshold_cfg, history);
        rec.next_threshold = threshold;
        rec.mean_feedback  = feedback_sum / static_cast<double>(agents.size());
        result.records.push_back(std::move(rec));
    }
    return result;
}

std::vector<PolicyResult> decide_llm(const SimulationConfig& config, int step, const std::vector<Regulation>& regs,
                                     const std::vector<AgentRuntime>& agents, double threshold)
{
    std::vector<PolicyResult> out(agents.size());
    const auto limit = static_cast<std::size_t>(config.llm.concurrency);
    for (std::size_t begin = 0; begin < agents.size(); begin += limit) {
        const std::size_t end = std::min(agents.size(), begin + limit);
        std::vector<std::future<LlmOutcome>> inflight;
        for (std::size_t i = begin; i < end; ++i) {
            const AgentRuntime& a    = agents[i];
            const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(step) * 1000003u + i;
            inflight.push_back(std::async(std::launch::async, [&, seed] {
                return llm_policy_decide(*a.profile, regs, context_for(a, threshold, config.max_step), config.llm,
                                         seed);
            }));
        }
        for (std::size_t i = begin; i < end; ++i) {
            LlmOutcome o = inflight[i - begin].get();
            out[i]       = {std::move(o.decision), o.failure};
        }
    }
    return out;
}

} // namespace

SimulationResult run(const SimulationConfig& config, const std::vector<ManufacturerProfile>& profiles,
                     const InitialConditions& initial, const Corpus& corpus)
{
    if (config.policy_kind == PolicyKind::scripted) {
        throw ArgumentError("scripted policy requires a decision script; use run_scripted");
    }
    if (config.policy_kind == PolicyKind::llm) {
        return run_loop(config, profiles, initial, corpus,
                        [&config](int step, const std::vector<Regulation>& regs,
                                  const std::vector<AgentRuntime>& agents, double threshold) {
                            return decide_llm(config, step, regs, agents, threshold);
                        });
    }
    return run_loop(config, profiles, initial, corpus,
                    [&config](int, const std::vector<Regulation>& regs, const std::vector<AgentRuntime>& agents,
                              double threshold) {
                        std::vector<PolicyResult> out;
                        out.reserve(agents.size());
                        for (const auto& a : agents) {
                            out.push_back({rule_policy_decide(*a.profile, regs,
                                                              context_for(a, threshold, config.max_step)),
                                           FailureKind::none});
                        }
                        return out;
                    });
}

SimulationResult run_scripted(const SimulationConfig& config, const std::vector<ManufacturerProfile>& profiles,
                              const InitialConditions& initial, const Corpus& corpus, const DecisionScript& script)
{
    if (script.size() < static_cast<std::size_t>(std::max(config.total_steps, 0))) {
        throw ArgumentError("decision script covers " + std::to_string(script.size()) + " of " +
                            std::to_string(config.total_steps) + " steps");
    }
    SimulationConfig cfg = config;
    cfg.policy_kind      = PolicyKind::scripted;
    return run_loop(cfg, profiles, initial, corpus,
                    [&script](int step, const std::vector<Regulation>&, const std::vector<AgentRuntime>& agents,
                              double) {
                        const auto& at = script[static_cast<std::size_t>(step)];
                        std::vector<PolicyResult> out;
                        out.reserve(agents.size());
                        for (const auto& a : agents) {
                            const auto it = at.find(a.profile->id);
                            if (it == at.end()) {
                                throw ArgumentError("decision script lacks agent '" + a.profile->id +
                                                    "' at step " + std::to_string(step));
                            }
                            out.push_back({it->second, FailureKind::none});
                        }
                        return out;
                    });
}

DecisionScript extract_script(const SimulationResult& result)
{
    DecisionScript script;
    script.reserve(result.records.size());
    for (const auto& rec : result.records) {
        auto& at = script.emplace_back();
        for (const auto& e : rec.agents) {
            at[e.agent_id] = e.decision;
        }
    }
    return script;
}

} // namespace regflow
