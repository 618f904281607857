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
#ifndef REGFLOW_ANALYSIS_HPP
#define REGFLOW_ANALYSIS_HPP

#include "regflow/dynamics.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace regflow
{

// ---- special functions ----------------------------------------------------

/// Regularized incomplete beta I_x(a, b) by Lentz continued fraction (rel. tol 1e-10, <= 300 iterations).
double regularized_incomplete_beta(double a, double b, double x);

/// P[X <= x] for X ~ F(d1, d2).
double f_cdf(double x, double d1, double d2);

/// P[X > x] for X ~ F(d1, d2), evaluated without cancellation.
double f_sf(double x, double d1, double d2);

// ---- evaluation metrics ---------------------------------------------------

inline constexpr double default_epsilon = 0.5;

struct MetricsReport {
    double adherence_accuracy{0};
    double compliance_stability{0};
    double epsilon{default_epsilon};
    double mean_compliance{0};
};

/// Fraction of steps with |c_t - g_t| < epsilon.
double adherence_accuracy(std::span<const double> c_series, std::span<const double> g_series, double epsilon);

/// Population variance of the compliance series.
double compliance_stability(std::span<const double> c_series);

MetricsReport metrics_report(std::span<const double> c_series, std::span<const double> g_series, double epsilon);

// ---- group comparison -----------------------------------------------------

struct WelchAnovaResult {
    double f_stat{0};
    int df1{1};
    double df2{0};
    double p_value{1};
    double variance_explained{0}; ///< eta-squared from classical sums of squares
};

/**
 * Welch's heteroscedastic one-way ANOVA.
 *
 * Every group needs >= 2 values. Groups with zero variance make the statistic
 * undefined unless all groups are constant with a common mean, in which case
 * F = 0 and p = 1 is returned.
 */
WelchAnovaResult welch_anova(const std::vector<std::vector<double>>& groups);

/// Classical equal-variance one-way ANOVA F statistic.
double classical_anova_f(const std::vector<std::vector<double>>& groups);

struct PairwiseComparison {
    std::size_t first{0};
    std::size_t second{0};
    double p_raw{1};
    double p_adjusted{1};
};

/// Welch test on every pair (i < j), p scaled by the number of pairs and capped at 1.
std::vector<PairwiseComparison> bonferroni_pairwise(const std::vector<std::vector<double>>& groups);

// ---- sensitivity sweep ----------------------------------------------------

inline const std::vector<std::string> sweep_outputs = {"G", "C", "M", "F"};

struct SweepResult {
    std::string parameter;
    std::vector<double> values;
    std::map<std::string, std::vector<double>> outputs;      ///< terminal G, C, M, F per value
    std::map<std::string, std::vector<double>> change_rates; ///< relative to baseline; NaN when undefined
    std::map<std::string, double> baseline;
};

/// Terminal (G, C, M, F) after integrating under each value of one coefficient.
SweepResult sweep(const ModelParameters& base, const SystemState& initial, double horizon, double dt,
                  const std::string& parameter, const std::vector<double>& values);

} // namespace regflow

#endif // REGFLOW_ANALYSIS_HPP
