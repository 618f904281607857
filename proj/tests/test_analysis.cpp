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
#include "regflow/analysis.hpp"
#include "regflow/errors.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace regflow;

TEST(IncompleteBeta, ReferenceValues)
{
    struct Case {
        double a, b, x, expect;
    };
    // values from an independent special-function library
    const std::vector<Case> cases = {
        {0.9, 0.9, 0.1, 0.11464699677582495},  {2.0, 3.0, 0.8, 0.9728},
        {0.5, 0.5, 0.3, 0.36901011956554536},  {10.0, 20.0, 0.4, 0.7853183897628262},
        {1.5, 76.4, 0.05, 0.95107223116341733}, {50.0, 60.0, 0.47, 0.62932268289546034},
    };
    for (const auto& c : cases) {
        EXPECT_NEAR(regularized_incomplete_beta(c.a, c.b, c.x), c.expect, 1e-9 * c.expect)
            << "a=" << c.a << " b=" << c.b << " x=" << c.x;
    }
}

TEST(IncompleteBeta, EndpointsAndSymmetry)
{
    EXPECT_EQ(regularized_incomplete_beta(2, 3, 0.0), 0.0);
    EXPECT_EQ(regularized_incomplete_beta(2, 3, 1.0), 1.0);
    for (double x : {0.1, 0.35, 0.6, 0.93}) {
        EXPECT_NEAR(regularized_incomplete_beta(2.5, 4.0, x) + regularized_incomplete_beta(4.0, 2.5, 1 - x), 1.0,
                    1e-12);
    }
}

TEST(FDistribution, SurvivalReferenceValues)
{
    EXPECT_NEAR(f_sf(5.76, 3, 152.81), 0.00092822130524905467, 1e-12);
    EXPECT_NEAR(f_sf(84.96, 2, 96.01) / 5.7563379035283975e-22, 1.0, 1e-8);
    EXPECT_NEAR(f_sf(19.2, 1, 6), 0.0046592149439939352, 1e-12);
}

TEST(FDistribution, ReportedStatisticsGiveReportedPValues)
{
    // published statistics carry two decimals, so p agrees to rounding only
    EXPECT_NEAR(f_sf(5.76, 3, 152.81), 9.23e-4, 0.01 * 9.23e-4);
    EXPECT_NEAR(f_sf(84.96, 2, 96.01), 5.77e-22, 0.01 * 5.77e-22);
}

TEST(FDistribution, CdfPlusSurvivalIsOne)
{
    for (double x : {0.01, 0.5, 1.0, 3.0, 12.0}) {
        EXPECT_NEAR(f_cdf(x, 4, 17.3) + f_sf(x, 4, 17.3), 1.0, 1e-12);
    }
    EXPECT_EQ(f_cdf(0.0, 3, 10), 0.0);
    EXPECT_EQ(f_sf(0.0, 3, 10), 1.0);
}

TEST(Adherence, Examples)
{
    const std::vector<double> c = {1, 2, 3};
    EXPECT_EQ(adherence_accuracy(c, std::vector<double>{1, 2, 3}, 0.1), 1.0);
    EXPECT_EQ(adherence_accuracy(c, std::vector<double>{1, 2, 10}, 0.5), 2.0 / 3.0);
    EXPECT_EQ(adherence_accuracy(std::vector<double>{1}, std::vector<double>{1.5}, 0.5), 0.0);
}

TEST(Adherence, Errors)
{
    const std::vector<double> empty;
    EXPECT_THROW(adherence_accuracy(empty, empty, 0.5), ArgumentError);
    EXPECT_THROW(adherence_accuracy(std::vector<double>{1, 2}, std::vector<double>{1}, 0.5), ArgumentError);
    EXPECT_THROW(adherence_accuracy(std::vector<double>{1}, std::vector<double>{1}, 0.0), ArgumentError);
}

TEST(Adherence, ShiftInvariantAndBounded)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> c(25), g(25);
        for (std::size_t i = 0; i < c.size(); ++i) {
            // quarter-unit grid keeps shifted differences exact
            c[i] = std::round(u(rng) * 4) / 4;
            g[i] = std::round(u(rng) * 4) / 4;
        }
        const double a = adherence_accuracy(c, g, 0.6);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0);
        auto cs = c, gs = g;
        for (std::size_t i = 0; i < c.size(); ++i) {
            cs[i] += 8.0;
            gs[i] += 8.0;
        }
        EXPECT_EQ(adherence_accuracy(cs, gs, 0.6), a);
    }
}

TEST(Stability, Examples)
{
    EXPECT_EQ(compliance_stability(std::vector<double>{4, 4, 4, 4}), 0.0);
    EXPECT_EQ(compliance_stability(std::vector<double>{1, 3}), 1.0);
    EXPECT_EQ(compliance_stability(std::vector<double>{2, 2, 5}), 2.0);
    EXPECT_THROW(compliance_stability(std::vector<double>{}), ArgumentError);
}

TEST(Stability, TranslationInvariantAndQuadraticScaling)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(1.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> c(40);
        std::generate(c.begin(), c.end(), [&] { return n(rng); });
        const double s = compliance_stability(c);
        EXPECT_GE(s, 0.0);
        auto shifted = c, scaled = c;
        for (std::size_t i = 0; i < c.size(); ++i) {
            shifted[i] += 3.25;
            scaled[i] *= -2.5;
        }
        EXPECT_NEAR(compliance_stability(shifted), s, 1e-12 * (1 + s));
        EXPECT_NEAR(compliance_stability(scaled), 6.25 * s, 1e-12 * (1 + s));
    }
}

TEST(Stability, ConstantSeriesIsZero)
{
    for (double v : {0.0, 0.1, 0.3, 1.0 / 3.0, 3.7, 7.25, 1e6, 1e8}) {
        for (std::size_t n : {1u, 2u, 9u, 17u, 73u}) {
            EXPECT_EQ(compliance_stability(std::vector<double>(n, v)), 0.0) << v << " x" << n;
        }
    }
}

TEST(MetricsReport, CarriesEpsilonAndMean)
{
    const auto r = metrics_report(std::vector<double>{1, 3}, std::vector<double>{1, 2}, 0.25);
    EXPECT_EQ(r.epsilon, 0.25);
    EXPECT_EQ(r.mean_compliance, 2.0);
    EXPECT_EQ(r.adherence_accuracy, 0.5);
    EXPECT_EQ(r.compliance_stability, 1.0);
}

TEST(WelchAnova, IdenticalGroups)
{
    const auto r = welch_anova({{1, 2, 3}, {1, 2, 3}});
    EXPECT_EQ(r.f_stat, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.df1, 1);
}

TEST(WelchAnova, TwoGroupReference)
{
    const auto r = welch_anova({{1, 2, 3, 4}, {5, 6, 7, 8}});
    EXPECT_NEAR(r.f_stat, 19.2, 1e-9);
    EXPECT_EQ(r.df1, 1);
    EXPECT_NEAR(r.df2, 6.0, 1e-9);
    EXPECT_NEAR(r.p_value, 0.0046592149439939352, 1e-9);
    EXPECT_NEAR(r.variance_explained, 0.76190476190476186, 1e-12);
}

TEST(WelchAnova, ThreeGroupUnequalVarianceReference)
{
    const std::vector<std::vector<double>> groups = {
        {2.1, 3.4, 1.9, 5.6, 4.2}, {6.3, 7.1, 5.8, 9.4}, {3.3, 3.9, 4.1, 2.8, 3.6, 4.4}};
    const auto r = welch_anova(groups);
    EXPECT_NEAR(r.f_stat, 7.9836348570156757, 1e-9);
    EXPECT_EQ(r.df1, 2);
    EXPECT_NEAR(r.df2, 5.3780057883978696, 1e-9);
    EXPECT_NEAR(r.p_value, 0.024555365606721089, 1e-9);
    EXPECT_NEAR(r.variance_explained, 0.66854842523408686, 1e-12);
}

TEST(WelchAnova, BalancedEqualVarianceTwoGroupsMatchesClassical)
{
    const std::vector<std::vector<double>> groups = {{1.0, 2.5, 3.1, 4.2}, {2.0, 3.5, 4.1, 5.2}};
    EXPECT_NEAR(welch_anova(groups).f_stat, classical_anova_f(groups), 1e-9);
}

TEST(WelchAnova, BalancedEqualVarianceManyGroupsSatisfiesCorrectionIdentity)
{
    // with equal n and equal s^2 the Welch numerator is the classical F and the
    // denominator reduces to 1 + 2(k-2)(k-1) / ((k+1) k (n-1))
    const std::vector<double> base = {0.0, 1.3, 2.1, 4.0, 4.6};
    for (std::size_t k : {3u, 4u, 6u}) {
        std::vector<std::vector<double>> groups;
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<double> g = base;
            for (double& v : g) {
                v += 0.7 * static_cast<double>(i * i);
            }
            groups.push_back(g);
        }
        const double kk = static_cast<double>(k);
        const double n  = static_cast<double>(base.size());
        const double b  = 1.0 + 2.0 * (kk - 2.0) * (kk - 1.0) / ((kk + 1.0) * kk * (n - 1.0));
        EXPECT_NEAR(welch_anova(groups).f_stat * b, classical_anova_f(groups), 1e-9);
    }
}

TEST(ClassicalAnova, Reference)
{
    EXPECT_NEAR(classical_anova_f({{1.0, 2.5, 3.1, 4.2}, {2.2, 3.0, 4.8, 5.5}, {0.5, 1.1, 2.9, 3.3}}),
                1.8873729639426424, 1e-12);
}

TEST(WelchAnova, DegenerateCases)
{
    const auto flat = welch_anova({{2, 2, 2}, {2, 2}});
    EXPECT_EQ(flat.f_stat, 0.0);
    EXPECT_EQ(flat.p_value, 1.0);
    EXPECT_THROW(welch_anova({{2, 2, 2}, {3, 3}}), DegenerateError);
    EXPECT_THROW(welch_anova({{1, 2, 3}}), ArgumentError);
    EXPECT_THROW(welch_anova({{1, 2, 3}, {4}}), ArgumentError);
}

TEST(WelchAnova, OrderInvariantAndNonNegative)
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> groups(4);
        for (std::size_t i = 0; i < groups.size(); ++i) {
            groups[i].resize(3 + i);
            for (double& v : groups[i]) {
                v = n(rng) * (1.0 + static_cast<double>(i)) + 0.3 * static_cast<double>(i);
            }
        }
        const auto r = welch_anova(groups);
        EXPECT_GE(r.f_stat, 0.0);
        EXPECT_GE(r.p_value, 0.0);
        EXPECT_LE(r.p_value, 1.0);
        EXPECT_GE(r.variance_explained, 0.0);
        EXPECT_LE(r.variance_explained, 1.0);
        auto reordered = groups;
        std::reverse(reordered.begin(), reordered.end());
        const auto q = welch_anova(reordered);
        EXPECT_NEAR(q.f_stat, r.f_stat, 1e-10 * (1 + r.f_stat));
        EXPECT_NEAR(q.df2, r.df2, 1e-10 * r.df2);
        EXPECT_NEAR(q.p_value, r.p_value, 1e-10);
    }
}

TEST(Bonferroni, PairCountsAndAdjustment)
{
    const auto two = bonferroni_pairwise({{1, 2, 3, 4}, {5, 6, 7, 8}});
    ASSERT_EQ(two.size(), 1u);
    EXPECT_EQ(two[0].p_adjusted, two[0].p_raw);

    const std::vector<std::vector<double>> groups = {
        {1, 2, 3, 4}, {1.5, 2.2, 3.9, 4.1}, {5, 6, 7, 8.5}, {0.2, 0.9, 1.4, 2.0}};
    const auto four = bonferroni_pairwise(groups);
    ASSERT_EQ(four.size(), 6u);
    std::size_t i = 0;
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b, ++i) {
            EXPECT_EQ(four[i].first, a);
            EXPECT_EQ(four[i].second, b);
            EXPECT_EQ(four[i].p_raw, welch_anova({groups[a], groups[b]}).p_value);
            EXPECT_EQ(four[i].p_adjusted, std::min(1.0, 6.0 * four[i].p_raw));
            EXPECT_GE(four[i].p_adjusted, four[i].p_raw);
            EXPECT_LE(four[i].p_adjusted, 1.0);
        }
    }
}

TEST(Bonferroni, IdenticalGroupsAllOne)
{
    for (const auto& pair : bonferroni_pairwise({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}})) {
        EXPECT_EQ(pair.p_adjusted, 1.0);
    }
}

namespace
{

ModelParameters guidance_only(double alpha1)
{
    ModelParameters p = test::reference_parameters();
    p.alpha1          = alpha1;
    p.beta1           = 0.0;
    return p;
}

} // namespace

TEST(Sweep, GuidanceDoublesWithAlpha1)
{
    const auto r = sweep(guidance_only(0.1), SystemState{0, 0, 0.5, 0.2}, 10.0, 0.05, "alpha1", {0.1, 0.2});
    ASSERT_EQ(r.change_rates.at("G").size(), 2u);
    EXPECT_NEAR(r.change_rates.at("G")[0], 0.0, 1e-12);
    EXPECT_NEAR(r.change_rates.at("G")[1], 1.0, 1e-9);
}

TEST(Sweep, TerminalGuidanceProportionalToAlpha1)
{
    const std::vector<double> values = {0.05, 0.3, 0.7, 1.9};
    const auto r = sweep(guidance_only(1.0), SystemState{0, 0, 1, 1}, 8.0, 0.05, "alpha1", values);
    for (std::size_t i = 0; i < values.size(); ++i) {
        EXPECT_NEAR(r.outputs.at("G")[i], values[i] * r.baseline.at("G"), 1e-12 * r.baseline.at("G"));
    }
}

TEST(Sweep, BaselineValueGivesZeroRates)
{
    const auto base = test::reference_parameters();
    for (const auto& name : parameter_names) {
        const auto r = sweep(base, SystemState{0, 1, 0.5, 0.2}, 2.0, 0.05, std::string(name),
                             {base[*parameter_index(name)]});
        for (const auto& out : sweep_outputs) {
            ASSERT_EQ(r.change_rates.at(out).size(), 1u);
            EXPECT_EQ(r.change_rates.at(out)[0], 0.0) << name << " " << out;
        }
    }
}

TEST(Sweep, MarketDecayReducesTerminalAdaptation)
{
    const auto base = test::reference_parameters();
    const auto r = sweep(base, SystemState{0, 1, 0.5, 0.2}, 10.0, 0.05, "beta3", {0.0, 0.1, 0.2, 0.4, 0.8, 1.6});
    const auto& m = r.outputs.at("M");
    for (std::size_t i = 1; i < m.size(); ++i) {
        EXPECT_LE(m[i], m[i - 1]);
    }
}

TEST(Sweep, UndefinedRateOnZeroBaseline)
{
    ModelParameters p;
    p.phi1       = 1.0;
    const auto r = sweep(p, SystemState{}, 1.0, 0.1, "alpha1", {0.5});
    EXPECT_TRUE(std::isnan(r.change_rates.at("G")[0]));
    EXPECT_GT(r.outputs.at("G")[0], 0.0);
}

TEST(Sweep, UnknownParameter)
{
    EXPECT_THROW(sweep(ModelParameters{}, SystemState{}, 1.0, 0.1, "delta", {0.1}), ArgumentError);
}

TEST(Sweep, SharedLengths)
{
    const auto r = sweep(test::reference_parameters(), SystemState{0, 1, 1, 1}, 1.0, 0.1, "phi2", {0.1, 0.2, 0.3});
    for (const auto& out : sweep_outputs) {
        EXPECT_EQ(r.outputs.at(out).size(), 3u);
        EXPECT_EQ(r.change_rates.at(out).size(), 3u);
    }
}
