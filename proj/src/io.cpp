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
#include "regflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace regflow
{

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- CSV ------------------------------------------------------------------

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    os << "t,G,C,M,F\n";
    for (const auto& s : traj.samples) {
        os << format_double(s.state.t) << ',' << format_double(s.state.g) << ',' << format_double(s.state.c) << ','
           << format_double(s.state.m) << ',' << format_double(s.f) << '\n';
    }
}

void write_observed_csv(std::ostream& os, const ObservedSeries& obs)
{
    os << "t,G,C,M,F\n";
    for (std::size_t i = 0; i < obs.size(); ++i) {
        os << format_double(obs.times[i]) << ',' << format_double(obs.g_obs[i]) << ','
           << format_double(obs.c_obs[i]) << ',' << format_double(obs.m_obs[i]) << ','
           << format_double(obs.f_obs[i]) << '\n';
    }
}

namespace
{

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, std::size_t line)
{
    const std::string t = trim(cell);
    std::size_t used    = 0;
    double v            = 0.0;
    try {
        v = std::stod(t, &used);
    }
    catch (const std::exception&) {
        throw ArgumentError("line " + std::to_string(line) + ": '" + t + "' is not a number");
    }
    if (used != t.size()) {
        throw ArgumentError("line " + std::to_string(line) + ": '" + t + "' is not a number");
    }
    return v;
}

} // namespace

ObservedSeries read_observed_csv(std::istream& is)
{
    std::string line;
    std::size_t lineno = 0;
    bool header_seen   = false;
    ObservedSeries obs;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        if (!header_seen) {
            std::string h = trim(line);
            h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
            if (h != "t,G,C,M,F") {
                throw ArgumentError("expected header t,G,C,M,F");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 5) {
            throw ArgumentError("line " + std::to_string(lineno) + ": expected 5 columns");
        }
        obs.times.push_back(parse_number(cells[0], lineno));
        obs.g_obs.push_back(parse_number(cells[1], lineno));
        obs.c_obs.push_back(parse_number(cells[2], lineno));
        obs.m_obs.push_back(parse_number(cells[3], lineno));
        obs.f_obs.push_back(parse_number(cells[4], lineno));
    }
    if (!header_seen) {
        throw ArgumentError("observed series file is empty");
    }
    validate(obs);
    return obs;
}

void write_simulation_csv(std::ostream& os, const SimulationResult& result)
{
    os << "step,agent,G,C,M,F,brr,approved,threshold,cost,adaptation\n";
    for (const auto& rec : result.records) {
        for (const auto& e : rec.agents) {
            os << rec.step << ',' << e.agent_id << ',' << format_double(e.state.g) << ','
               << format_double(e.state.c) << ',' << format_double(e.state.m) << ',' << format_double(e.f) << ','
               << (e.brr ? format_double(*e.brr) : "") << ',' << (e.approved ? (*e.approved ? "1" : "0") : "")
               << ',' << format_double(rec.threshold) << ',' << format_double(e.compliance_cost) << ','
               << format_double(e.market_adaptation) << '\n';
        }
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep)
{
    os << "parameter,value,G,C,M,F,rate_G,rate_C,rate_M,rate_F\n";
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
        os << sweep.parameter << ',' << format_double(sweep.values[i]);
        for (const auto& name : sweep_outputs) {
            os << ',' << format_double(sweep.outputs.at(name)[i]);
        }
        for (const auto& name : sweep_outputs) {
            const double r = sweep.change_rates.at(name)[i];
            os << ',' << (std::isnan(r) ? std::string("undefined") : format_double(r));
        }
        os << '\n';
    }
}

// ---- JSON -----------------------------------------------------------------

namespace
{

template <typename T>
T get_or(const json& j, const char* key, const T& fallback)
{
    if (!j.contains(key) || j[key].is_null()) {
        return fallback;
    }
    try {
        return j[key].get<T>();
    }
    catch (const json::exception& e) {
        throw ArgumentError(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T require(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) {
        throw ArgumentError(std::string("missing field '") + key + "'");
    }
    try {
        return j[key].get<T>();
    }
    catch (const json::exception& e) {
        throw ArgumentError(std::string("field '") + key + "': " + e.what());
    }
}

void require_object(const json& j, const char* what)
{
    if (!j.is_object()) {
        throw ArgumentError(std::string(what) + " must be a JSON object");
    }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what)
{
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ArgumentError(std::string("unknown field '") + key + "' in " + what);
        }
    }
}

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

} // namespace

json to_json(const ModelParameters& p)
{
    json j = json::object();
    for (std::size_t i = 0; i < num_parameters; ++i) {
        j[std::string(parameter_names[i])] = p[i];
    }
    return j;
}

ModelParameters parameters_from_json(const json& j, const ModelParameters& defaults)
{
    require_object(j, "parameters");
    ModelParameters p = defaults;
    for (const auto& [key, value] : j.items()) {
        const auto idx = parameter_index(key);
        if (!idx) {
            throw ArgumentError("unknown parameter '" + key + "'");
        }
        if (!value.is_number()) {
            throw ArgumentError("parameter '" + key + "' must be a number");
        }
        p[*idx] = value.get<double>();
    }
    try {
        validate(p);
    }
    catch (const DomainError& e) {
        throw ArgumentError(e.what());
    }
    return p;
}

json to_json(const SystemState& s)
{
    return {{"t", s.t}, {"g", s.g}, {"c", s.c}, {"m", s.m}};
}

SystemState state_from_json(const json& j, const SystemState& defaults)
{
    require_object(j, "state");
    reject_unknown(j, {"t", "g", "c", "m"}, "state");
    SystemState s{get_or(j, "t", defaults.t), get_or(j, "g", defaults.g), get_or(j, "c", defaults.c),
                  get_or(j, "m", defaults.m)};
    try {
        validate(s);
    }
    catch (const DomainError& e) {
        throw ArgumentError(e.what());
    }
    return s;
}

json to_json(const ParameterBounds& b)
{
    json j = json::object();
    for (std::size_t i = 0; i < num_parameters; ++i) {
        j[std::string(parameter_names[i])] = {b.lo[i], b.hi[i]};
    }
    return j;
}

ParameterBounds bounds_from_json(const json& j, const ParameterBounds& defaults)
{
    require_object(j, "bounds");
    ParameterBounds b = defaults;
    for (const auto& [key, value] : j.items()) {
        const auto idx = parameter_index(key);
        if (!idx) {
            throw ArgumentError("unknown parameter '" + key + "' in bounds");
        }
        if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
            throw ArgumentError("bounds for '" + key + "' must be [lo, hi]");
        }
        b.lo[*idx] = value[0].get<double>();
        b.hi[*idx] = value[1].get<double>();
    }
    validate(b);
    return b;
}

json to_json(const FitResult& r)
{
    return {{"params", to_json(r.params)},
            {"objective", r.objective_value},
            {"components",
             {{"e_g", r.components.e_g}, {"e_c", r.components.e_c}, {"e_m", r.components.e_m},
              {"e_f", r.components.e_f}}},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"restarts_used", r.restarts_used}};
}

json to_json(const Regulation& r)
{
    return {{"id", r.id},
            {"strictness", std::string(to_string(r.strictness))},
            {"title", r.title},
            {"body", r.body},
            {"topic", r.topic}};
}

Regulation regulation_from_json(const json& j)
{
    require_object(j, "regulation");
    Regulation r;
    r.id             = require<std::string>(j, "id");
    const auto level = parse_strictness(require<std::string>(j, "strictness"));
    if (!level) {
        throw ArgumentError("regulation '" + r.id + "': strictness must be strict or lenient");
    }
    r.strictness = *level;
    r.title      = get_or<std::string>(j, "title", "");
    r.body       = require<std::string>(j, "body");
    r.topic      = get_or<std::string>(j, "topic", "");
    return r;
}

json to_json(const Corpus& c)
{
    json j = json::array();
    for (const auto& r : c) {
        j.push_back(to_json(r));
    }
    return j;
}

Corpus corpus_from_json(const json& j)
{
    if (!j.is_array()) {
        throw ArgumentError("corpus must be a JSON array");
    }
    Corpus c;
    for (const auto& item : j) {
        c.push_back(regulation_from_json(item));
    }
    validate(c);
    return c;
}

json to_json(const ManufacturerProfile& p)
{
    return {{"id", p.id},
            {"name", p.name},
            {"resource_tier", std::string(to_string(p.resource_tier))},
            {"risk_preference", std::string(to_string(p.risk_preference))},
            {"ai_investment_fraction", p.ai_investment_fraction},
            {"focus", p.focus}};
}

ManufacturerProfile profile_from_json(const json& j)
{
    require_object(j, "profile");
    ManufacturerProfile p;
    p.id         = require<std::string>(j, "id");
    p.name       = get_or<std::string>(j, "name", "Company " + p.id);
    const auto t = parse_resource_tier(get_or<std::string>(j, "resource_tier", "medium"));
    const auto r = parse_risk_preference(get_or<std::string>(j, "risk_preference", "medium"));
    if (!t || !r) {
        throw ArgumentError("profile '" + p.id + "': unknown resource tier or risk preference");
    }
    p.resource_tier          = *t;
    p.risk_preference        = *r;
    p.ai_investment_fraction = get_or(j, "ai_investment_fraction", 0.0);
    p.focus                  = get_or<std::string>(j, "focus", "");
    validate(p);
    return p;
}

std::vector<ManufacturerProfile> profiles_from_json(const json& j)
{
    if (!j.is_array()) {
        throw ArgumentError("profiles must be a JSON array");
    }
    std::vector<ManufacturerProfile> out;
    for (const auto& item : j) {
        out.push_back(profile_from_json(item));
    }
    return out;
}

json to_json(const Submission& s)
{
    return {{"agent_id", s.agent_id},
            {"safety", s.safety},
            {"effectiveness", s.effectiveness},
            {"compliance", s.compliance},
            {"adverse", s.adverse},
            {"regulation_ids", s.regulation_ids},
            {"narrative", s.narrative}};
}

Submission submission_from_json(const json& j)
{
    require_object(j, "submission");
    Submission s;
    s.agent_id       = require<std::string>(j, "agent_id");
    s.safety         = require<int>(j, "safety");
    s.effectiveness  = require<int>(j, "effectiveness");
    s.compliance     = require<int>(j, "compliance");
    s.adverse        = require<int>(j, "adverse");
    s.regulation_ids = get_or(j, "regulation_ids", std::vector<std::string>{});
    s.narrative      = get_or<std::string>(j, "narrative", "");
    try {
        validate(s);
    }
    catch (const DomainError& e) {
        throw ArgumentError(e.what());
    }
    return s;
}

json to_json(const AgentDecision& d)
{
    json adj = json::object();
    for (const auto& [name, delta] : d.adjustments.deltas) {
        adj[name] = delta;
    }
    return {{"comply", d.comply},
            {"adjustments", adj},
            {"submission", d.submission ? to_json(*d.submission) : json(nullptr)},
            {"rationale", d.rationale}};
}

AgentDecision decision_from_json(const json& j)
{
    require_object(j, "decision");
    AgentDecision d;
    d.comply = require<bool>(j, "comply");
    if (j.contains("adjustments")) {
        require_object(j["adjustments"], "adjustments");
        for (const auto& [name, value] : j["adjustments"].items()) {
            if (!parameter_index(name) || !value.is_number()) {
                throw ArgumentError("bad adjustment '" + name + "'");
            }
            d.adjustments.deltas[name] = value.get<double>();
        }
    }
    if (j.contains("submission") && !j["submission"].is_null()) {
        d.submission = submission_from_json(j["submission"]);
    }
    d.rationale = get_or<std::string>(j, "rationale", "");
    return d;
}

json to_json(const SimulationConfig& c)
{
    return {{"total_steps", c.total_steps},
            {"dt_per_step", c.dt_per_step},
            {"inner_substeps", c.inner_substeps},
            {"schedule",
             {{"strict_steps", c.schedule.strict_steps},
              {"lenient_steps", c.schedule.lenient_steps},
              {"cycle", c.schedule.cycle}}},
            {"threshold",
             {{"base", c.threshold_cfg.base},
              {"kappa", c.threshold_cfg.kappa},
              {"window", c.threshold_cfg.window},
              {"floor", c.threshold_cfg.floor},
              {"ceiling", c.threshold_cfg.ceiling}}},
            {"param_bounds", to_json(c.param_bounds)},
            {"max_step", c.max_step},
            {"seed", c.seed},
            {"policy", std::string(to_string(c.policy_kind))},
            {"llm",
             {{"endpoint", c.llm.endpoint},
              {"path", c.llm.path},
              {"model", c.llm.model},
              {"timeout_seconds", c.llm.timeout_seconds},
              {"retries", c.llm.retries},
              {"concurrency", c.llm.concurrency},
              {"temperature", c.llm.temperature}}},
            {"record_substates", c.record_substates}};
}

SimulationConfig config_from_json(const json& j)
{
    require_object(j, "simulation config");
    reject_unknown(j,
                   {"total_steps", "dt_per_step", "inner_substeps", "schedule", "threshold", "param_bounds",
                    "max_step", "seed", "policy", "llm", "record_substates"},
                   "simulation config");
    SimulationConfig c;
    c.total_steps    = get_or(j, "total_steps", c.total_steps);
    c.dt_per_step    = get_or(j, "dt_per_step", c.dt_per_step);
    c.inner_substeps = get_or(j, "inner_substeps", c.inner_substeps);
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        require_object(s, "schedule");
        reject_unknown(s, {"strict_steps", "lenient_steps", "cycle"}, "schedule");
        c.schedule.strict_steps  = get_or(s, "strict_steps", c.schedule.strict_steps);
        c.schedule.lenient_steps = get_or(s, "lenient_steps", c.schedule.lenient_steps);
        c.schedule.cycle         = get_or(s, "cycle", c.schedule.cycle);
    }
    if (j.contains("threshold")) {
        const auto& t = j["threshold"];
        require_object(t, "threshold");
        reject_unknown(t, {"base", "kappa", "window", "floor", "ceiling"}, "threshold");
        c.threshold_cfg.base    = get_or(t, "base", c.threshold_cfg.base);
        c.threshold_cfg.kappa   = get_or(t, "kappa", c.threshold_cfg.kappa);
        c.threshold_cfg.window  = get_or(t, "window", c.threshold_cfg.window);
        c.threshold_cfg.floor   = get_or(t, "floor", c.threshold_cfg.floor);
        c.threshold_cfg.ceiling = get_or(t, "ceiling", c.threshold_cfg.ceiling);
    }
    if (j.contains("param_bounds")) {
        c.param_bounds = bounds_from_json(j["param_bounds"], c.param_bounds);
    }
    c.max_step = get_or(j, "max_step", c.max_step);
    c.seed     = get_or(j, "seed", c.seed);
    if (j.contains("policy")) {
        const auto kind = parse_policy_kind(require<std::string>(j, "policy"));
        if (!kind) {
            throw ArgumentError("policy must be rule, scripted or llm");
        }
        c.policy_kind = *kind;
    }
    if (j.contains("llm")) {
        const auto& l = j["llm"];
        require_object(l, "llm");
        reject_unknown(l, {"endpoint", "path", "model", "timeout_seconds", "retries", "concurrency", "temperature"},
                       "llm");
        c.llm.endpoint        = get_or(l, "endpoint", c.llm.endpoint);
        c.llm.path            = get_or(l, "path", c.llm.path);
        c.llm.model           = get_or(l, "model", c.llm.model);
        c.llm.timeout_seconds = get_or(l, "timeout_seconds", c.llm.timeout_seconds);
        c.llm.retries         = get_or(l, "retries", c.llm.retries);
        c.llm.concurrency     = get_or(l, "concurrency", c.llm.concurrency);
        c.llm.temperature     = get_or(l, "temperature", c.llm.temperature);
    }
    c.record_substates = get_or(j, "record_substates", c.record_substates);
    validate(c);
    return c;
}

json to_json(const SimulationResult& r)
{
    json profiles = json::array();
    for (const auto& p : r.profiles) {
        profiles.push_back(to_json(p));
    }
    json records = json::array();
    for (const auto& rec : r.records) {
        json agents = json::array();
        for (const auto& e : rec.agents) {
            json a = {{"agent_id", e.agent_id},
                      {"params", to_json(e.params)},
                      {"state", to_json(e.state)},
                      {"f", e.f},
                      {"decision", to_json(e.decision)},
                      {"brr", optional_number(e.brr)},
                      {"approved", e.approved ? json(*e.approved) : json(nullptr)},
                      {"compliance_cost", e.compliance_cost},
                      {"market_adaptation", e.market_adaptation},
                      {"fallback", std::string(to_string(e.fallback))}};
            if (!e.substates.empty()) {
                json subs = json::array();
                for (const auto& s : e.substates) {
                    subs.push_back(to_json(s));
                }
                a["substates"] = subs;
            }
            agents.push_back(std::move(a));
        }
        records.push_back({{"step", rec.step},
                           {"phase", std::string(to_string(rec.phase))},
                           {"regulation_ids", rec.regulation_ids},
                           {"threshold", rec.threshold},
                           {"next_threshold", rec.next_threshold},
                           {"mean_feedback", rec.mean_feedback},
                           {"approvals", rec.approvals},
                           {"agents", agents}});
    }
    return {{"config", to_json(r.config)},
            {"profiles", profiles},
            {"clamp_events", r.clamp_events},
            {"llm_fallbacks", r.llm_fallbacks},
            {"records", records}};
}

namespace
{

FailureKind parse_failure_kind(const std::string& s)
{
    for (auto k : {FailureKind::none, FailureKind::timeout, FailureKind::transport, FailureKind::parse}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw ArgumentError("unknown fallback kind '" + s + "'");
}

} // namespace

SimulationResult result_from_json(const json& j)
{
    require_object(j, "simulation result");
    SimulationResult r;
    r.config        = config_from_json(require<json>(j, "config"));
    r.profiles      = profiles_from_json(require<json>(j, "profiles"));
    r.clamp_events  = get_or<std::size_t>(j, "clamp_events", 0);
    r.llm_fallbacks = get_or<std::size_t>(j, "llm_fallbacks", 0);
    const json records = require<json>(j, "records");
    if (!records.is_array()) {
        throw ArgumentError("records must be an array");
    }
    for (const auto& rj : records) {
        StepRecord rec;
        rec.step           = require<int>(rj, "step");
        const auto phase   = parse_strictness(require<std::string>(rj, "phase"));
        if (!phase) {
            throw ArgumentError("bad phase in record " + std::to_string(rec.step));
        }
        rec.phase          = *phase;
        rec.regulation_ids = get_or(rj, "regulation_ids", std::vector<std::string>{});
        rec.threshold      = require<double>(rj, "threshold");
        rec.next_threshold = get_or(rj, "next_threshold", rec.threshold);
        rec.mean_feedback  = require<double>(rj, "mean_feedback");
        rec.approvals      = get_or(rj, "approvals", 0);
        const json agents  = require<json>(rj, "agents");
        if (!agents.is_array()) {
            throw ArgumentError("agents must be an array");
        }
        for (const auto& aj : agents) {
            AgentStepEntry e;
            e.agent_id          = require<std::string>(aj, "agent_id");
            e.params            = parameters_from_json(require<json>(aj, "params"));
            e.state             = state_from_json(require<json>(aj, "state"));
            e.f                 = require<double>(aj, "f");
            e.decision          = decision_from_json(require<json>(aj, "decision"));
            if (aj.contains("brr") && !aj["brr"].is_null()) {
                e.brr = require<double>(aj, "brr");
            }
            if (aj.contains("approved") && !aj["approved"].is_null()) {
                e.approved = require<bool>(aj, "approved");
            }
            e.compliance_cost   = require<double>(aj, "compliance_cost");
            e.market_adaptation = require<double>(aj, "market_adaptation");
            e.fallback          = parse_failure_kind(get_or<std::string>(aj, "fallback", "none"));
            if (aj.contains("substates")) {
                for (const auto& sj : aj["substates"]) {
                    e.substates.push_back(state_from_json(sj));
                }
            }
            rec.agents.push_back(std::move(e));
        }
        r.records.push_back(std::move(rec));
    }
    return r;
}

json to_json(const DecisionScript& s)
{
    json steps = json::array();
    for (const auto& at : s) {
        json step = json::object();
        for (const auto& [id, d] : at) {
            step[id] = to_json(d);
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

DecisionScript script_from_json(const json& j)
{
    if (!j.is_array()) {
        throw ArgumentError("decision script must be an array of steps");
    }
    DecisionScript s;
    for (const auto& step : j) {
        require_object(step, "script step");
        auto& at = s.emplace_back();
        for (const auto& [id, d] : step.items()) {
            at[id] = decision_from_json(d);
        }
    }
    return s;
}

json to_json(const MetricsReport& m)
{
    return {{"adherence_accuracy", m.adherence_accuracy},
            {"compliance_stability", m.compliance_stability},
            {"epsilon", m.epsilon},
            {"mean_compliance", m.mean_compliance}};
}

json to_json(const WelchAnovaResult& w)
{
    return {{"f_stat", w.f_stat},
            {"df1", w.df1},
            {"df2", w.df2},
            {"p_value", w.p_value},
            {"variance_explained", w.variance_explained}};
}

// ---- files ----------------------------------------------------------------

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("cannot open '" + path.string() + "'");
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw ArgumentError("'" + path.string() + "' is not valid JSON");
    }
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ArgumentError("cannot write '" + path.string() + "'");
    }
    out << content;
    if (!out) {
        throw ArgumentError("failed writing '" + path.string() + "'");
    }
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

} // namespace regflow
