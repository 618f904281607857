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

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace regflow
{

namespace
{

constexpr double beta_rel_tol   = 1e-10;
constexpr int beta_max_iter     = 300;
constexpr double lentz_tiny     = 1e-300;

double beta_continued_fraction(double a, double b, double x)
{
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < lentz_tiny) {
        d = lentz_tiny;
    }
    d        = 1.0 / d;
    double h = d;
    for (int m = 1; m <= beta_max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa       = m * (b - m) * x / ((qam + m2) * (a + m2));
        d               = 1.0 + aa * d;
        d               = std::abs(d) < lentz_tiny ? lentz_tiny : d;
        c               = 1.0 + aa / c;
        c               = std::abs(c) < lentz_tiny ? lentz_tiny : c;
        d               = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d  = 1.0 + aa * d;
        d  = std::abs(d) < lentz_tiny ? lentz_tiny : d;
        c  = 1.0 + aa / c;
        c  = std::abs(c) < lentz_tiny ? lentz_tiny : c;
        d  = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < beta_rel_tol) {
            return h;
        }
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !(x >= 0.0 && x <= 1.0)) {
        throw DomainError("x", "incomplete beta requires a, b > 0 and x in [0, 1]");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x == 1.0) {
        return 1.0;
    }
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2)
{
    if (x <= 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    return regularized_incomplete_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double f_sf(double x, double d1, double d2)
{
    if (x <= 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x));
}

double adherence_accuracy(std::span<const double> c_series, std::span<const double> g_series, double epsilon)
{
    if (c_series.empty() || c_series.size() != g_series.size()) {
        throw ArgumentError("adherence needs two non-empty series of equal length");
    }
    if (!(epsilon > 0.0)) {
        throw ArgumentError("epsilon must be positive");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < c_series.size(); ++i) {
        hits += std::abs(c_series[i] - g_series[i]) < epsilon ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(c_series.size());
}

double compliance_stability(std::span<const double> c_series)
{
    if (c_series.empty()) {
        throw ArgumentError("stability of an empty series");
    }
    const Eigen::Map<const Eigen::ArrayXd> c(c_series.data(), static_cast<Eigen::Index>(c_series.size()));
    const Eigen::ArrayXd d = c - c(0);
    return (d - d.mean()).square().mean();
}

MetricsReport metrics_report(std::span<const double> c_series, std::span<const double> g_series, double epsilon)
{
    MetricsReport r;
    r.adherence_accuracy   = adherence_accuracy(c_series, g_series, epsilon);
    r.compliance_stability = compliance_stability(c_series);
    r.epsilon              = epsilon;
    const Eigen::Map<const Eigen::ArrayXd> c(c_series.data(), static_cast<Eigen::Index>(c_series.size()));
    r.mean_compliance = c.mean();
    return r;
}

namespace
{

struct GroupSummary {
    double n{0};
    double mean{0};
    double var{0}; ///< sample variance
};

std::vector<GroupSummary> summarize(const std::vector<std::vector<double>>& groups)
{
    if (groups.size() < 2) {
        throw ArgumentError("group comparison needs at least two groups");
    }
    std::vector<GroupSummary> out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        if (g.size() < 2) {
            throw ArgumentError("group " + std::to_string(i) + " has fewer than two values");
        }
        const Eigen::Map<const Eigen::ArrayXd> x(g.data(), static_cast<Eigen::Index>(g.size()));
        if (!x.isFinite().all()) {
            throw ArgumentError("group " + std::to_string(i) + " has non-finite values");
        }
        const double mean = x.mean();
        const double var  = (x - mean).square().sum() / static_cast<double>(g.size() - 1);
        out.push_back({static_cast<double>(g.size()), mean, var});
    }
    return out;
}

double eta_squared(const std::vector<std::vector<double>>& groups, const std::vector<GroupSummary>& s)
{
    double total_n = 0.0, total_sum = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        total_n += s[i].n;
        total_sum += s[i].n * s[i].mean;
    }
    const double grand = total_sum / total_n;
    double ss_between = 0.0, ss_total = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        ss_between += s[i].n * (s[i].mean - grand) * (s[i].mean - grand);
        for (double v : groups[i]) {
            ss_total += (v - grand) * (v - grand);
        }
    }
    return ss_total > 0.0 ? std::clamp(ss_between / ss_total, 0.0, 1.0) : 0.0;
}

} // namespace

WelchAnovaResult welch_anova(const std::vector<std::vector<double>>& groups)
{
    const std::vector<GroupSummary> s = summarize(groups);
    const double k                    = static_cast<double>(s.size());

    WelchAnovaResult r;
    r.df1 = static_cast<int>(s.size()) - 1;

    const bool any_zero = std::any_of(s.begin(), s.end(), [](const GroupSummary& g) { return g.var == 0.0; });
    if (any_zero) {
        const bool all_zero = std::all_of(s.begin(), s.end(), [](const GroupSummary& g) { return g.var == 0.0; });
        const bool same_mean =
            std::all_of(s.begin(), s.end(), [&](const GroupSummary& g) { return g.mean == s.front().mean; });
        if (all_zero && same_mean) {
            double n = 0.0;
            for (const auto& g : s) {
                n += g.n;
            }
            r.f_stat  = 0.0;
            r.df2     = n - k;
            r.p_value = 1.0;
            return r;
        }
        throw DegenerateError("Welch ANOVA undefined: a group has zero variance");
    }

    double w_sum = 0.0, wx_sum = 0.0;
    for (const auto& g : s) {
        const double w = g.n / g.var;
        w_sum += w;
        wx_sum += w * g.mean;
    }
    const double grand = wx_sum / w_sum;
    double between = 0.0, lambda = 0.0;
    for (const auto& g : s) {
        const double w = g.n / g.var;
        between += w * (g.mean - grand) * (g.mean - grand);
        const double u = 1.0 - w / w_sum;
        lambda += u * u / (g.n - 1.0);
    }
    const double numerator   = between / (k - 1.0);
    const double denominator = 1.0 + 2.0 * (k - 2.0) / (k * k - 1.0) * lambda;

    r.f_stat = numerator / denominator;
    r.df2    = lambda > 0.0 ? (k * k - 1.0) / (3.0 * lambda) : std::numeric_limits<double>::infinity();
    r.p_value            = std::clamp(f_sf(r.f_stat, r.df1, r.df2), 0.0, 1.0);
    r.variance_explained = eta_squared(groups, s);
    return r;
}

double classical_anova_f(const std::vector<std::vector<double>>& groups)
{
    const std::vector<GroupSummary> s = summarize(groups);
    double n = 0.0, sum = 0.0, ss_within = 0.0;
    for (const auto& g : s) {
        n += g.n;
        sum += g.n * g.mean;
        ss_within += (g.n - 1.0) * g.var;
    }
    const double grand = sum / n;
    double ss_between  = 0.0;
    for (const auto& g : s) {
        ss_between += g.n * (g.mean - grand) * (g.mean - grand);
    }
    const double k = static_cast<double>(s.size());
    return (ss_between / (k - 1.0)) / (ss_within / (n - k));
}

std::vector<PairwiseComparison> bonferroni_pairwise(const std::vector<std::vector<double>>& groups)
{
    if (groups.size() < 2) {
        throw ArgumentError("pairwise comparison needs at least two groups");
    }
    const std::size_t pairs = groups.size() * (groups.size() - 1) / 2;
    std::vector<PairwiseComparison> out;
    out.reserve(pairs);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const WelchAnovaResult w = welch_anova({groups[i], groups[j]});
            out.push_back({i, j, w.p_value, std::min(1.0, w.p_value * static_cast<double>(pairs))});
        }
    }
    return out;
}

SweepResult sweep(const ModelParameters& base, const SystemState& initial, double horizon, double dt,
                  const std::string& parameter, const std::vector<double>& values)
{
    const auto idx = parameter_index(parameter);
    if (!idx) {
        throw ArgumentError("unknown parameter '" + parameter + "'");
    }
    const auto terminal = [&](const ModelParameters& p) {
        const TrajectorySample last = integrate(initial, p, horizon, dt).samples.back();
        return std::map<std::string, double>{
            {"G", last.state.g}, {"C", last.state.c}, {"M", last.state.m}, {"F", last.f}};
    };

    SweepResult r;
    r.parameter = parameter;
    r.values    = values;
    r.baseline  = terminal(base);
    for (double v : values) {
        ModelParameters p = base;
        p[*idx]           = v;
        const auto out    = terminal(p);
        for (const auto& name : sweep_outputs) {
            const double b = r.baseline.at(name);
            r.outputs[name].push_back(out.at(name));
            r.change_rates[name].push_back(b != 0.0 ? (out.at(name) - b) / std::abs(b)
                                                    : std::numeric_limits<double>::quiet_NaN());
        }
    }
    for (const auto& name : sweep_outputs) {
        r.outputs[name];
        r.change_rates[name];
    }
    return r;
}

} // namespace regflow
