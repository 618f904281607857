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
#include "regflow/cli.hpp"

#include "regflow/analysis.hpp"
#include "regflow/io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace regflow::cli
{

namespace fs = std::filesystem;

namespace
{

std::set<std::string> parse_formats(const std::string& text)
{
    std::set<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item != "csv" && item != "json") {
            throw ArgumentError("unknown output format '" + item + "'");
        }
        out.insert(item);
    }
    if (out.empty()) {
        throw ArgumentError("no output format selected");
    }
    return out;
}

std::vector<double> parse_values(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v         = 0.0;
        try {
            v = std::stod(item, &used);
        }
        catch (const std::exception&) {
            throw ArgumentError("'" + item + "' is not a number");
        }
        if (used != item.size()) {
            throw ArgumentError("'" + item + "' is not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ArgumentError("no sweep values given");
    }
    return out;
}

std::string signed3(double v)
{
    if (std::isnan(v)) {
        return "undefined";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.3f", v);
    return buf;
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ArgumentError("cannot create output directory '" + dir.string() + "'");
    }
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn)
{
    try {
        return fn();
    }
    catch (const NumericalError& e) {
        err << "numerical error at step " << e.step() << ": " << e.what() << '\n';
        return exit_numerical;
    }
    catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
    catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
    catch (const DegenerateError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
    catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
    catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
}

} // namespace

RunManifest manifest_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw ArgumentError("config must be a JSON object");
    }
    RunManifest m;
    nlohmann::json config = j;
    const auto take_path  = [&](const char* key, std::optional<fs::path>& slot) {
        if (config.contains(key)) {
            if (!config[key].is_string()) {
                throw ArgumentError(std::string("'") + key + "' must be a path string");
            }
            slot = config[key].get<std::string>();
            config.erase(key);
        }
    };
    take_path("profile_file", m.profile_file);
    take_path("corpus_file", m.corpus_file);
    take_path("initial_file", m.initial_file);
    take_path("script_file", m.script_file);
    if (config.contains("output_dir")) {
        if (!config["output_dir"].is_string()) {
            throw ArgumentError("'output_dir' must be a path string");
        }
        m.output_dir = config["output_dir"].get<std::string>();
        config.erase("output_dir");
    }
    if (config.contains("formats")) {
        const auto& f = config["formats"];
        if (f.is_string()) {
            m.formats = parse_formats(f.get<std::string>());
        }
        else if (f.is_array()) {
            std::string joined;
            for (const auto& item : f) {
                if (!item.is_string()) {
                    throw ArgumentError("formats must be strings");
                }
                joined += (joined.empty() ? "" : ",") + item.get<std::string>();
            }
            m.formats = parse_formats(joined);
        }
        else {
            throw ArgumentError("formats must be a string or an array");
        }
        config.erase("formats");
    }
    m.config = config_from_json(config);
    return m;
}

InitialConditions initial_from_json(const nlohmann::json& j, const std::vector<ManufacturerProfile>& profiles)
{
    InitialConditions init = default_initial_conditions(profiles);
    if (!j.is_object()) {
        throw ArgumentError("initial conditions must be a JSON object keyed by agent id");
    }
    for (const auto& [id, entry] : j.items()) {
        auto it = init.find(id);
        if (it == init.end()) {
            throw ArgumentError("initial conditions for unknown agent '" + id + "'");
        }
        if (!entry.is_object()) {
            throw ArgumentError("initial conditions for '" + id + "' must be an object");
        }
        if (entry.contains("params")) {
            it->second.params = parameters_from_json(entry["params"], it->second.params);
        }
        if (entry.contains("state")) {
            it->second.state = state_from_json(entry["state"], it->second.state);
        }
    }
    return init;
}

int cmd_simulate(const RunManifest& manifest, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const auto profiles = manifest.profile_file ? profiles_from_json(read_json_file(*manifest.profile_file))
                                                    : default_profiles();
        const Corpus corpus =
            manifest.corpus_file ? corpus_from_json(read_json_file(*manifest.corpus_file)) : build_default_corpus();
        const InitialConditions initial = manifest.initial_file
                                              ? initial_from_json(read_json_file(*manifest.initial_file), profiles)
                                              : default_initial_conditions(profiles);

        SimulationResult result;
        if (manifest.config.policy_kind == PolicyKind::scripted) {
            if (!manifest.script_file) {
                throw ArgumentError("scripted policy needs script_file");
            }
            const DecisionScript script = script_from_json(read_json_file(*manifest.script_file));
            result = regflow::run_scripted(manifest.config, profiles, initial, corpus, script);
        }
        else {
            result = regflow::run(manifest.config, profiles, initial, corpus);
        }

        ensure_dir(manifest.output_dir);
        if (manifest.formats.contains("json")) {
            write_text_file(manifest.output_dir / "result.json", dump(to_json(result)));
        }
        if (manifest.formats.contains("csv")) {
            std::ostringstream csv;
            write_simulation_csv(csv, result);
            write_text_file(manifest.output_dir / "trajectories.csv", csv.str());
        }

        int approvals = 0;
        for (const auto& rec : result.records) {
            approvals += rec.approvals;
        }
        out << "steps=" << result.records.size() << " agents=" << result.profiles.size()
            << " approvals=" << approvals << " final_threshold=" << format_double(result.records.back().next_threshold)
            << " clamps=" << result.clamp_events << " fallbacks=" << result.llm_fallbacks << '\n';
        return exit_ok;
    });
}

int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        std::ifstream in(args.obs_file);
        if (!in) {
            throw ArgumentError("cannot open '" + args.obs_file.string() + "'");
        }
        const ObservedSeries obs     = read_observed_csv(in);
        const ParameterBounds bounds = args.bounds_file ? bounds_from_json(read_json_file(*args.bounds_file))
                                                        : ParameterBounds::defaults();
        const ModelParameters guess  = args.guess_file
                                           ? parameters_from_json(read_json_file(*args.guess_file), default_parameters())
                                           : bounds.clip(default_parameters());

        const FitResult result = fit(obs, guess, bounds, args.options);
        ensure_dir(args.output_dir);
        write_text_file(args.output_dir / "fit.json", dump(to_json(result)));

        char buf[128];
        std::snprintf(buf, sizeof buf, "objective=%.6e iterations=%d converged=%s", result.objective_value,
                      result.iterations, result.converged ? "true" : "false");
        out << buf << '\n';
        return exit_ok;
    });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        if (!parameter_index(args.parameter)) {
            throw ArgumentError("unknown parameter '" + args.parameter + "'");
        }
        const ModelParameters base = args.params_file
                                         ? parameters_from_json(read_json_file(*args.params_file), default_parameters())
                                         : default_parameters();
        const SystemState initial = args.initial_file
                                        ? state_from_json(read_json_file(*args.initial_file), default_initial_state())
                                        : default_initial_state();
        for (double v : args.values) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw ArgumentError("sweep values must be finite and non-negative");
            }
        }

        const SweepResult r = sweep(base, initial, args.horizon, args.dt, args.parameter, args.values);
        ensure_dir(args.output_dir);
        std::ostringstream csv;
        write_sweep_csv(csv, r);
        write_text_file(args.output_dir / "sweep.csv", csv.str());

        for (std::size_t i = 0; i < r.values.size(); ++i) {
            out << args.parameter << '=' << format_double(r.values[i]);
            for (const auto& name : sweep_outputs) {
                out << " rate_" << name << '=' << signed3(r.change_rates.at(name)[i]);
            }
            out << '\n';
        }
        return exit_ok;
    });
}

int cmd_metrics(const MetricsArgs& args, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const SimulationResult result = result_from_json(read_json_file(args.result_file));
        if (result.records.empty()) {
            throw ArgumentError("result has no records");
        }

        std::map<std::string, std::vector<double>> c_series, g_series;
        for (const auto& rec : result.records) {
            for (const auto& e : rec.agents) {
                c_series[e.agent_id].push_back(e.state.c);
                g_series[e.agent_id].push_back(e.state.g);
            }
        }

        nlohmann::json report = {{"epsilon", args.epsilon}, {"agents", nlohmann::json::object()}};
        for (const auto& [id, c] : c_series) {
            report["agents"][id] = to_json(metrics_report(c, g_series.at(id), args.epsilon));
        }

        if (args.groups) {
            std::map<std::string, std::string> group_of;
            if (*args.groups == "tier") {
                for (const auto& p : result.profiles) {
                    group_of[p.id] = std::string(to_string(p.resource_tier));
                }
            }
            else {
                const auto gj = read_json_file(*args.groups);
                if (!gj.is_object()) {
                    throw ArgumentError("groups file must map agent ids to group names");
                }
                for (const auto& [id, name] : gj.items()) {
                    if (!name.is_string() || !c_series.contains(id)) {
                        throw ArgumentError("bad group assignment for '" + id + "'");
                    }
                    group_of[id] = name.get<std::string>();
                }
            }

            const auto& last = result.records.back();
            std::map<std::string, std::vector<double>> members;
            std::map<std::string, std::vector<std::string>> member_ids;
            for (const auto& e : last.agents) {
                if (auto it = group_of.find(e.agent_id); it != group_of.end()) {
                    members[it->second].push_back(e.market_adaptation);
                    member_ids[it->second].push_back(e.agent_id);
                }
            }

            std::vector<std::string> names;
            std::vector<std::vector<double>> groups;
            nlohmann::json gjson = nlohmann::json::object();
            for (const auto& [name, values] : members) {
                names.push_back(name);
                groups.push_back(values);
                gjson[name] = {{"agents", member_ids[name]}, {"market_adaptation", values}};
            }

            nlohmann::json comparison = {{"statistic", "terminal market adaptation"}, {"groups", gjson}};
            try {
                comparison["welch_anova"] = to_json(welch_anova(groups));
                nlohmann::json pairs      = nlohmann::json::array();
                for (const auto& pc : bonferroni_pairwise(groups)) {
                    pairs.push_back({{"pair", {names[pc.first], names[pc.second]}},
                                     {"p_raw", pc.p_raw},
                                     {"p_adjusted", pc.p_adjusted}});
                }
                comparison["pairwise"] = pairs;
            }
            catch (const DegenerateError& e) {
                comparison["error"] = e.what();
            }
            catch (const ArgumentError& e) {
                comparison["error"] = e.what();
            }
            report["group_comparison"] = comparison;
        }

        ensure_dir(args.output_dir);
        write_text_file(args.output_dir / "metrics.json", dump(report));
        for (const auto& [id, m] : report["agents"].items()) {
            out << id << " adherence=" << format_double(m["adherence_accuracy"].get<double>())
                << " stability=" << format_double(m["compliance_stability"].get<double>()) << '\n';
        }
        if (report.contains("group_comparison") && report["group_comparison"].contains("welch_anova")) {
            const auto& w = report["group_comparison"]["welch_anova"];
            out << "welch F(" << w["df1"].get<int>() << ", " << format_double(w["df2"].get<double>())
                << ") = " << format_double(w["f_stat"].get<double>())
                << " p=" << format_double(w["p_value"].get<double>()) << '\n';
        }
        return exit_ok;
    });
}

int cmd_corpus_print(const std::optional<fs::path>& corpus_file, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const Corpus corpus = corpus_file ? corpus_from_json(read_json_file(*corpus_file)) : build_default_corpus();
        out << dump(to_json(corpus));
        return exit_ok;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"regflow: regulator-manufacturer feedback simulation"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", policy, llm_endpoint, formats, script_path;
    std::uint64_t seed = 0;
    auto* sim = app.add_subcommand("simulate", "run the multi-agent simulation");
    sim->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sim->add_option("--out", out_dir, "output directory");
    auto* sim_seed = sim->add_option("--seed", seed, "random seed");
    sim->add_option("--policy", policy, "rule|scripted|llm")->check(CLI::IsMember({"rule", "scripted", "llm"}));
    sim->add_option("--llm-endpoint", llm_endpoint, "chat-completions endpoint URL");
    sim->add_option("--format", formats, "comma-separated output formats (csv,json)");
    sim->add_option("--script", script_path, "decision script for the scripted policy")->check(CLI::ExistingFile);

    CalibrateArgs cal;
    std::string cal_obs, cal_guess, cal_bounds, cal_out = "out";
    auto* calc = app.add_subcommand("calibrate", "fit model parameters to an observed series");
    calc->add_option("--obs", cal_obs, "observed series CSV (t,G,C,M,F)")->required();
    calc->add_option("--guess", cal_guess, "initial guess parameters JSON");
    calc->add_option("--bounds", cal_bounds, "parameter bounds JSON");
    calc->add_option("--max-iter", cal.options.max_iter, "iterations per run");
    calc->add_option("--tol", cal.options.tol, "convergence tolerance");
    calc->add_option("--restarts", cal.options.restarts, "random restarts");
    calc->add_option("--seed", cal.options.seed, "restart seed");
    calc->add_option("--dt", cal.options.dt, "integration step");
    calc->add_option("--out", cal_out, "output directory");

    SweepArgs sw;
    std::string sw_params, sw_initial, sw_values, sw_out = "out";
    auto* swc = app.add_subcommand("sweep", "one-parameter sensitivity sweep");
    swc->add_option("--params", sw_params, "base parameters JSON");
    swc->add_option("--initial", sw_initial, "initial state JSON");
    swc->add_option("--parameter", sw.parameter, "coefficient to vary")->required();
    swc->add_option("--values", sw_values, "comma-separated values")->required();
    swc->add_option("--horizon", sw.horizon, "integration horizon");
    swc->add_option("--dt", sw.dt, "integration step");
    swc->add_option("--out", sw_out, "output directory");

    MetricsArgs ma;
    std::string ma_result, ma_groups, ma_out = "out";
    auto* mc = app.add_subcommand("metrics", "adherence, stability and group statistics of a result");
    mc->add_option("--result", ma_result, "result.json from simulate")->required();
    mc->add_option("--epsilon", ma.epsilon, "adherence tolerance");
    mc->add_option("--groups", ma_groups, "'tier' or a JSON file mapping agent id to group");
    mc->add_option("--out", ma_out, "output directory");

    std::string corpus_path;
    auto* cc    = app.add_subcommand("corpus", "regulation corpus utilities");
    auto* print = cc->add_subcommand("print", "print the regulation corpus as JSON");
    print->add_option("--corpus", corpus_path, "corpus JSON file");
    cc->require_subcommand(1);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input;
    }

    if (sim->parsed()) {
        RunManifest manifest;
        try {
            if (!config_path.empty()) {
                manifest = manifest_from_json(read_json_file(config_path));
                const fs::path base = fs::path(config_path).parent_path();
                for (auto* slot : {&manifest.profile_file, &manifest.corpus_file, &manifest.initial_file,
                                   &manifest.script_file}) {
                    if (*slot && slot->value().is_relative()) {
                        *slot = base / slot->value();
                    }
                }
            }
            if (sim->count("--out") > 0 || config_path.empty()) {
                manifest.output_dir = out_dir;
            }
            if (sim_seed->count() > 0) {
                manifest.config.seed = seed;
            }
            if (!policy.empty()) {
                manifest.config.policy_kind = *parse_policy_kind(policy);
            }
            if (!llm_endpoint.empty()) {
                manifest.config.llm.endpoint = llm_endpoint;
            }
            if (!formats.empty()) {
                manifest.formats = parse_formats(formats);
            }
            if (!script_path.empty()) {
                manifest.script_file = script_path;
            }
        }
        catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return exit_input;
        }
        return cmd_simulate(manifest, out, err);
    }
    if (calc->parsed()) {
        cal.obs_file   = cal_obs;
        cal.output_dir = cal_out;
        if (!cal_guess.empty()) {
            cal.guess_file = cal_guess;
        }
        if (!cal_bounds.empty()) {
            cal.bounds_file = cal_bounds;
        }
        return cmd_calibrate(cal, out, err);
    }
    if (swc->parsed()) {
        try {
            sw.values = parse_values(sw_values);
        }
        catch (const ArgumentError& e) {
            err << "error: " << e.what() << '\n';
            return exit_input;
        }
        sw.output_dir = sw_out;
        if (!sw_params.empty()) {
            sw.params_file = sw_params;
        }
        if (!sw_initial.empty()) {
            sw.initial_file = sw_initial;
        }
        return cmd_sweep(sw, out, err);
    }
    if (mc->parsed()) {
        ma.result_file = ma_result;
        ma.output_dir  = ma_out;
        if (!ma_groups.empty()) {
            ma.groups = ma_groups;
        }
        return cmd_metrics(ma, out, err);
    }
    if (print->parsed()) {
        return cmd_corpus_print(corpus_path.empty() ? std::nullopt : std::optional<fs::path>(corpus_path), out, err);
    }
    return exit_input;
}

} // namespace regflow::cli
