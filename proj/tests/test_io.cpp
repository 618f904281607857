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

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace regflow;

TEST(FormatDouble, RoundTripsEveryBit)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) / 7.0;
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(2.0), "2");
}

TEST(TrajectoryCsv, HeaderAndRows)
{
    const auto traj = integrate(SystemState{0, 1, 0.5, 0.2}, test::reference_parameters(), 0.3, 0.1);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "t,G,C,M,F");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 4);
}

TEST(ObservedCsv, RoundTrip)
{
    const auto obs = generate_synthetic(test::reference_parameters(), SystemState{0, 1, 0.5, 0.2}, 5.0, 0.05, 7,
                                        0.05, 10);
    std::stringstream ss;
    write_observed_csv(ss, obs);
    const auto back = read_observed_csv(ss);
    EXPECT_EQ(back.times, obs.times);
    EXPECT_EQ(back.g_obs, obs.g_obs);
    EXPECT_EQ(back.c_obs, obs.c_obs);
    EXPECT_EQ(back.m_obs, obs.m_obs);
    EXPECT_EQ(back.f_obs, obs.f_obs);
}

TEST(ObservedCsv, Rejections)
{
    std::istringstream empty("");
    EXPECT_THROW(read_observed_csv(empty), ArgumentError);
    std::istringstream header_only("t,G,C,M,F\n");
    EXPECT_THROW(read_observed_csv(header_only), ArgumentError);
    std::istringstream wrong_header("time,g,c,m,f\n0,1,1,1,1\n1,1,1,1,1\n");
    EXPECT_THROW(read_observed_csv(wrong_header), ArgumentError);
    std::istringstream short_row("t,G,C,M,F\n0,1,1,1\n1,1,1,1,1\n");
    EXPECT_THROW(read_observed_csv(short_row), ArgumentError);
    std::istringstream text("t,G,C,M,F\n0,1,abc,1,1\n1,1,1,1,1\n");
    EXPECT_THROW(read_observed_csv(text), ArgumentError);
    std::istringstream negative("t,G,C,M,F\n0,1,1,1,1\n1,1,-1,1,1\n");
    EXPECT_THROW(read_observed_csv(negative), DomainError);
}

TEST(ParametersJson, RoundTripAndPartial)
{
    std::mt19937_64 rng(3);
    const auto p = test::random_parameters(rng);
    EXPECT_EQ(parameters_from_json(to_json(p)), p);
    const auto partial = parameters_from_json(json::parse(R"({"beta1": 0.7})"), p);
    EXPECT_EQ(partial.beta1, 0.7);
    EXPECT_EQ(partial.alpha1, p.alpha1);
    EXPECT_THROW(parameters_from_json(json::parse(R"({"beta9": 0.7})")), ArgumentError);
    EXPECT_THROW(parameters_from_json(json::parse(R"({"beta1": "x"})")), ArgumentError);
    EXPECT_THROW(parameters_from_json(json::parse(R"({"beta1": -1})")), ArgumentError);
}

TEST(StateJson, RoundTrip)
{
    const SystemState s{1.25, 0.1, 2.0, 3.5};
    EXPECT_EQ(state_from_json(to_json(s)), s);
    EXPECT_THROW(state_from_json(json::parse(R"({"q": 1})")), ArgumentError);
}

TEST(BoundsJson, RoundTrip)
{
    auto b      = ParameterBounds::defaults();
    b.hi.gamma2 = 3.0;
    const auto back = bounds_from_json(to_json(b));
    EXPECT_EQ(back.lo, b.lo);
    EXPECT_EQ(back.hi, b.hi);
    const auto partial = bounds_from_json(json::parse(R"({"phi1": [0.5, 1.5]})"));
    EXPECT_EQ(partial.lo.phi1, 0.5);
    EXPECT_EQ(partial.hi.phi1, 1.5);
    EXPECT_EQ(partial.hi.alpha1, 10.0);
    EXPECT_THROW(bounds_from_json(json::parse(R"({"phi1": [2, 1]})")), ArgumentError);
    EXPECT_THROW(bounds_from_json(json::parse(R"({"phi1": 2})")), ArgumentError);
}

TEST(ProfileJson, RoundTrip)
{
    for (const auto& p : default_profiles()) {
        EXPECT_EQ(profile_from_json(to_json(p)), p);
    }
    json arr = json::array();
    for (const auto& p : default_profiles()) {
        arr.push_back(to_json(p));
    }
    EXPECT_EQ(profiles_from_json(arr), default_profiles());
    EXPECT_THROW(profile_from_json(json::parse(R"({"id": "A", "resource_tier": "huge"})")), ArgumentError);
}

TEST(DecisionJson, RoundTrip)
{
    AgentDecision d;
    d.comply                       = true;
    d.adjustments.deltas["alpha2"] = 0.03;
    d.submission                   = Submission{"A", 8, 7, 9, 4, {"S1", "S2"}, "docs"};
    d.rationale                    = "because";
    EXPECT_EQ(decision_from_json(to_json(d)), d);
    AgentDecision refuse;
    refuse.rationale = "hold";
    EXPECT_EQ(decision_from_json(to_json(refuse)), refuse);
    EXPECT_EQ(submission_from_json(to_json(*d.submission)), *d.submission);
}

TEST(ConfigJson, RoundTripAndStrictKeys)
{
    SimulationConfig c;
    c.total_steps         = 12;
    c.schedule.cycle      = false;
    c.threshold_cfg.kappa = 0.6;
    c.policy_kind         = PolicyKind::llm;
    c.llm.model           = "m";
    c.seed                = 17;
    const auto back       = config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_EQ(back.seed, 17u);
    EXPECT_THROW(config_from_json(json::parse(R"({"total_step": 5})")), ArgumentError);
    EXPECT_THROW(config_from_json(json::parse(R"({"policy": "oracle"})")), ArgumentError);
    EXPECT_THROW(config_from_json(json::parse(R"({"total_steps": 0})")), ArgumentError);
}

TEST(ResultJson, RoundTripPreservesEverything)
{
    SimulationConfig cfg;
    cfg.total_steps      = 6;
    cfg.record_substates = true;
    const auto profiles  = default_profiles();
    const auto r         = run(cfg, profiles, default_initial_conditions(profiles), build_default_corpus());
    const json j         = to_json(r);
    const auto back      = result_from_json(j);
    EXPECT_EQ(dump(to_json(back)), dump(j));
    EXPECT_EQ(back.records.size(), 6u);
    EXPECT_EQ(back.records[3].agents[2].substates.size(), 21u);
}

TEST(ScriptJson, RoundTrip)
{
    SimulationConfig cfg;
    cfg.total_steps     = 4;
    const auto profiles = default_profiles();
    const auto r        = run(cfg, profiles, default_initial_conditions(profiles), build_default_corpus());
    const auto script   = extract_script(r);
    EXPECT_EQ(script_from_json(to_json(script)), script);
}

TEST(SimulationCsv, OneRowPerAgentStep)
{
    SimulationConfig cfg;
    cfg.total_steps     = 5;
    const auto profiles = default_profiles();
    const auto r        = run(cfg, profiles, default_initial_conditions(profiles), build_default_corpus());
    std::ostringstream os;
    write_simulation_csv(os, r);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "step,agent,G,C,M,F,brr,approved,threshold,cost,adaptation");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10);
    }
    EXPECT_EQ(rows, 50);
}

TEST(SweepCsv, UndefinedMarker)
{
    ModelParameters p;
    p.phi1       = 1.0;
    const auto r = sweep(p, SystemState{}, 1.0, 0.1, "alpha1", {0.5});
    std::ostringstream os;
    write_sweep_csv(os, r);
    EXPECT_NE(os.str().find("parameter,value,G,C,M,F,rate_G,rate_C,rate_M,rate_F\n"), std::string::npos);
    EXPECT_NE(os.str().find("undefined"), std::string::npos);
}

TEST(AnalysisJson, Fields)
{
    const json m = to_json(MetricsReport{0.5, 1.0, 0.5, 2.0});
    EXPECT_EQ(m.at("adherence_accuracy"), 0.5);
    EXPECT_EQ(m.at("compliance_stability"), 1.0);
    EXPECT_EQ(m.at("mean_compliance"), 2.0);
    const json w = to_json(welch_anova({{1, 2, 3, 4}, {5, 6, 7, 8}}));
    EXPECT_EQ(w.at("df1"), 1);
    EXPECT_TRUE(w.contains("p_value"));
    EXPECT_TRUE(w.contains("variance_explained"));
}

TEST(Files, ReadAndWrite)
{
    const auto dir = test::scratch_dir("io_files");
    write_text_file(dir / "a.json", dump(json{{"k", 1}}));
    EXPECT_EQ(read_json_file(dir / "a.json").at("k"), 1);
    EXPECT_THROW(read_json_file(dir / "missing.json"), ArgumentError);
    write_text_file(dir / "bad.json", "{not json");
    EXPECT_THROW(read_json_file(dir / "bad.json"), ArgumentError);
}
