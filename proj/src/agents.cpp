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
#include "regflow/agents.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace regflow
{

std::string_view to_string(ResourceTier t)
{
    switch (t) {
    case ResourceTier::limited:
        return "limited";
    case ResourceTier::medium:
        return "medium";
    case ResourceTier::rich:
        return "rich";
    }
    return "medium";
}

std::string_view to_string(RiskPreference r)
{
    switch (r) {
    case RiskPreference::low:
        return "low";
    case RiskPreference::medium:
        return "medium";
    case RiskPreference::high:
        return "high";
    }
    return "medium";
}

std::optional<ResourceTier> parse_resource_tier(std::string_view text)
{
    for (auto t : {ResourceTier::limited, ResourceTier::medium, ResourceTier::rich}) {
        if (text == to_string(t)) {
            return t;
        }
    }
    return std::nullopt;
}

std::optional<RiskPreference> parse_risk_preference(std::string_view text)
{
    for (auto r : {RiskPreference::low, RiskPreference::medium, RiskPreference::high}) {
        if (text == to_string(r)) {
            return r;
        }
    }
    return std::nullopt;
}

int tier_index(ResourceTier t)
{
    return t == ResourceTier::limited ? 0 : t == ResourceTier::medium ? 1 : 2;
}

void validate(const ManufacturerProfile& p)
{
    if (p.id.empty()) {
        throw ArgumentError("manufacturer profile without id");
    }
    if (!(p.ai_investment_fraction >= 0.0 && p.ai_investment_fraction <= 1.0)) {
        throw ArgumentError("ai_investment_fraction of '" + p.id + "' outside [0, 1]");
    }
}

std::vector<ManufacturerProfile> default_profiles()
{
    using T = ResourceTier;
    using R = RiskPreference;
    return {
        {"A", "Company A", T::rich, R::high, 0.35, "AI-assisted diagnostic imaging"},
        {"B", "Company B", T::rich, R::medium, 0.25, "wearable cardiac monitoring"},
        {"C", "Company C", T::limited, R::low, 0.05, "orthopedic implants with embedded sensing"},
        {"D", "Company D", T::limited, R::medium, 0.10, "diabetes management software"},
        {"E", "Company E", T::medium, R::low, 0.15, "surgical robotics control software"},
        {"F", "Company F", T::medium, R::medium, 0.20, "remote patient monitoring"},
        {"G", "Company G", T::medium, R::high, 0.30, "clinical decision support"},
        {"H", "Company H", T::limited, R::high, 0.12, "digital pathology"},
        {"I", "Company I", T::limited, R::low, 0.06, "respiratory therapy devices"},
        {"J", "Company J", T::rich, R::low, 0.40, "oncology imaging analytics"},
    };
}

void validate(const AgentDecision& d, std::string_view agent_id, double max_step)
{
    if (d.comply != d.submission.has_value()) {
        throw ArgumentError("decision must carry a submission exactly when it complies");
    }
    if (d.submission) {
        if (d.submission->agent_id != agent_id) {
            throw ArgumentError("submission agent id does not match the deciding agent");
        }
        validate(*d.submission);
    }
    for (const auto& [name, delta] : d.adjustments.deltas) {
        if (!parameter_index(name)) {
            throw ArgumentError("unknown parameter '" + name + "'");
        }
        if (!std::isfinite(delta) || std::abs(delta) > max_step) {
            throw ArgumentError("adjustment of '" + name + "' exceeds max_step");
        }
    }
}

bool clip_deltas(ParameterAdjustment& adj, double max_step)
{
    bool changed = false;
    for (auto& [name, delta] : adj.deltas) {
        const double clipped = std::clamp(delta, -max_step, max_step);
        if (clipped != delta) {
            delta   = clipped;
            changed = true;
        }
    }
    return changed;
}

namespace
{

Strictness uniform_strictness(const std::vector<Regulation>& regulations)
{
    if (regulations.empty()) {
        throw ArgumentError("policy needs at least one regulation");
    }
    const Strictness s = regulations.front().strictness;
    for (const auto& r : regulations) {
        if (r.strictness != s) {
            throw ArgumentError("regulations of mixed strictness");
        }
    }
    return s;
}

std::vector<std::string> regulation_ids(const std::vector<Regulation>& regulations)
{
    std::vector<std::string> ids;
    ids.reserve(regulations.size());
    for (const auto& r : regulations) {
        ids.push_back(r.id);
    }
    return ids;
}

std::string join(const std::vector<std::string>& items, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += items[i];
    }
    return out;
}

std::string fixed4(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

int clip_score(int v)
{
    return std::clamp(v, 1, 10);
}

} // namespace

AgentDecision rule_policy_decide(const ManufacturerProfile& profile, const std::vector<Regulation>& regulations,
                                 const PolicyContext& ctx)
{
    validate(profile);
    const Strictness phase = uniform_strictness(regulations);
    const bool strict      = phase == Strictness::strict;
    const int ti           = tier_index(profile.resource_tier);
    const double r         = 0.5 * (ti + 1);

    AgentDecision d;
    d.comply = true;
    auto& deltas = d.adjustments.deltas;
    if (strict) {
        deltas["alpha2"] = 0.02 * r;
        deltas["phi2"]   = 0.01 * r;
        deltas["beta2"]  = -0.01 * r;
    }
    else {
        deltas["alpha3"] = 0.02 * r;
        deltas["beta3"]  = -0.01 * r;
    }
    if (!ctx.last_approved) {
        deltas["alpha2"] += 0.01 * r;
    }
    clip_deltas(d.adjustments, ctx.max_step);

    const int ai_bonus = static_cast<int>(std::trunc(std::round(4.0 * profile.ai_investment_fraction * 10.0) / 10.0));
    Submission s;
    s.agent_id       = profile.id;
    s.safety         = clip_score(5 + ti + (strict ? 1 : 0));
    s.effectiveness  = clip_score(4 + ti + ai_bonus);
    s.compliance     = clip_score(5 + ti + (strict ? 2 : 0));
    s.adverse        = clip_score(6 - ti - (profile.risk_preference == RiskPreference::low ? 1 : 0));
    s.regulation_ids = regulation_ids(regulations);
    s.narrative      = profile.name + " compliance submission for " + join(s.regulation_ids, ", ");
    d.submission     = std::move(s);

    d.rationale = "rule policy: " + std::string(to_string(profile.resource_tier)) + " tier under " +
                  std::string(to_string(phase)) + " regulations" +
                  (ctx.last_approved ? "" : ", reinforcing compliance after rejection");
    return d;
}

ModelParameters apply_adjustments(const ModelParameters& p, const ParameterAdjustment& adj,
                                  const ParameterBounds& bounds)
{
    ModelParameters out = p;
    for (const auto& [name, delta] : adj.deltas) {
        const auto idx = parameter_index(name);
        if (!idx) {
            throw ArgumentError("unknown parameter '" + name + "'");
        }
        out[*idx] = std::clamp(out[*idx] + delta, bounds.lo[*idx], bounds.hi[*idx]);
    }
    return out;
}

std::string render_prompt(const ManufacturerProfile& profile, const std::vector<Regulation>& regulations,
                          const PolicyContext& ctx)
{
    const Strictness phase = uniform_strictness(regulations);
    std::ostringstream os;
    os << "You are " << profile.name << ", a medical device manufacturer.\n\n";
    os << "Profile:\n";
    os << "- resource tier: " << to_string(profile.resource_tier) << '\n';
    os << "- risk preference: " << to_string(profile.risk_preference) << '\n';
    os << "- AI investment fraction: " << fixed4(profile.ai_investment_fraction) << '\n';
    os << "- focus: " << profile.focus << "\n\n";

    os << "The regulatory authority has issued the following " << to_string(phase) << " regulations:\n\n";
    for (const auto& r : regulations) {
        os << "[" << r.id << "] " << r.title << " (" << r.topic << ")\n" << r.body << "\n\n";
    }

    os << "Your current state:\n";
    os << "- guidance issuance G: " << fixed4(ctx.state.g) << '\n';
    os << "- compliance effort C: " << fixed4(ctx.state.c) << '\n';
    os << "- market adaptation M: " << fixed4(ctx.state.m) << '\n';
    os << "- manufacturer feedback F: " << fixed4(eval_feedback(ctx.state, ctx.params)) << "\n\n";

    os << "Your current operational parameters:\n";
    for (std::size_t i = 0; i < num_parameters; ++i) {
        os << (i == 0 ? "" : ", ") << parameter_names[i] << '=' << fixed4(ctx.params[i]);
    }
    os << "\n\n";

    os << "Authority approval threshold (benefit-risk ratio): " << fixed4(ctx.threshold) << '\n';
    os << "Last submission approved: " << (ctx.last_approved ? "yes" : "no") << "\n\n";

    os << "Decide whether to comply, how to adjust your parameters, and score your submission.\n"
          "Reply with a single JSON object and nothing else, exactly of the form:\n"
          "{\"comply\": true|false, \"adjustments\": {\"<parameter>\": <number>, ...}, "
          "\"safety\": <1-10>, \"effectiveness\": <1-10>, \"compliance\": <1-10>, \"adverse\": <1-10>, "
          "\"rationale\": \"<text>\"}\n";
    os << "Each adjustment must lie within +/-" << fixed4(ctx.max_step) << ".\n";
    return os.str();
}

namespace
{

std::string_view strip_code_fence(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    text.remove_prefix(first);
    if (!text.starts_with("```")) {
        return text;
    }
    const auto eol = text.find('\n');
    if (eol == std::string_view::npos) {
        return text;
    }
    text.remove_prefix(eol + 1);
    const auto close = text.rfind("```");
    return close == std::string_view::npos ? text : text.substr(0, close);
}

std::optional<int> integral_score(const nlohmann::json& v)
{
    if (v.is_number_integer()) {
        const auto raw = v.get<long long>();
        return static_cast<int>(std::clamp<long long>(raw, -1000, 1000));
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && std::floor(d) == d) {
            return static_cast<int>(std::clamp(d, -1000.0, 1000.0));
        }
    }
    return std::nullopt;
}

ReplyParse failure(std::string message)
{
    ReplyParse r;
    r.error = std::move(message);
    return r;
}

} // namespace

ReplyParse parse_llm_reply(std::string_view text, const std::string& agent_id,
                           const std::vector<Regulation>& regulations, double max_step)
{
    const std::string_view body = strip_code_fence(text);
    const auto doc = nlohmann::json::parse(body.begin(), body.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        return failure("reply is not a JSON object");
    }
    for (const char* key : {"comply", "adjustments", "safety", "effectiveness", "compliance", "adverse", "rationale"}) {
        if (!doc.contains(key)) {
            return failure(std::string("reply lacks field '") + key + "'");
        }
    }
    if (!doc["comply"].is_boolean() || !doc["adjustments"].is_object() || !doc["rationale"].is_string()) {
        return failure("reply field has the wrong type");
    }

    ReplyParse out;
    AgentDecision d;
    d.comply    = doc["comply"].get<bool>();
    d.rationale = doc["rationale"].get<std::string>();
    for (const auto& [name, value] : doc["adjustments"].items()) {
        if (!parameter_index(name)) {
            return failure("reply adjusts unknown parameter '" + name + "'");
        }
        if (!value.is_number() || !std::isfinite(value.get<double>())) {
            return failure("adjustment of '" + name + "' is not a finite number");
        }
        d.adjustments.deltas[name] = value.get<double>();
    }
    out.clipped = clip_deltas(d.adjustments, max_step);

    int scores[4];
    const char* score_keys[4] = {"safety", "effectiveness", "compliance", "adverse"};
    for (int i = 0; i < 4; ++i) {
        const auto v = integral_score(doc[score_keys[i]]);
        if (!v) {
            return failure(std::string("score '") + score_keys[i] + "' is not an integer");
        }
        scores[i] = clip_score(*v);
        out.clipped |= scores[i] != *v;
    }

    if (d.comply) {
        Submission s;
        s.agent_id       = agent_id;
        s.safety         = scores[0];
        s.effectiveness  = scores[1];
        s.compliance     = scores[2];
        s.adverse        = scores[3];
        s.regulation_ids = regulation_ids(regulations);
        s.narrative      = d.rationale;
        d.submission     = std::move(s);
    }
    out.decision = std::move(d);
    return out;
}

} // namespace regflow
