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
#ifndef REGFLOW_CALIBRATION_HPP
#define REGFLOW_CALIBRATION_HPP

#include "regflow/dynamics.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace regflow
{

/// Observed (or synthetic) series. All columns share the length of times.
struct ObservedSeries {
    std::vector<double> times;
    std::vector<double> g_obs;
    std::vector<double> c_obs;
    std::vector<double> m_obs;
    std::vector<double> f_obs;

    std::size_t size() const noexcept
    {
        return times.size();
    }
};

/// Throws ArgumentError unless columns agree in length (>= 2) and times strictly increase.
void validate(const ObservedSeries& obs);

struct ObjectiveComponents {
    double e_g{0}, e_c{0}, e_m{0}, e_f{0};

    double total() const noexcept
    {
        return e_g + e_c + e_m + e_f;
    }
};

/// Box constraints per coefficient, in parameter_names order.
struct ParameterBounds {
    ModelParameters lo;
    ModelParameters hi;

    /// alpha, beta in [0, 10]; phi in [0, 5]; gamma in [0, 10].
    static ParameterBounds defaults();

    ModelParameters clip(const ModelParameters& p) const;
    bool contains(const ModelParameters& p) const;
};

/// Throws ArgumentError unless 0 <= lo <= hi per field.
void validate(const ParameterBounds& bounds);

/**
 * Squared residuals of obs against a precomputed trajectory.
 *
 * Each observed time is snapped to the nearest trajectory sample; the F residual
 * uses the sample's stored feedback. Throws ArgumentError if an observed time
 * falls beyond the last sample.
 */
ObjectiveComponents residuals(const Trajectory& predicted, const ObservedSeries& obs);

/// Integrates from the first observed row with step dt and returns the residual sums.
ObjectiveComponents objective(const ModelParameters& p, const ObservedSeries& obs, double dt);

struct FitOptions {
    int max_iter{5000};
    double tol{1e-12};
    int restarts{0};
    std::uint64_t seed{0};
    double dt{0.05};
};

struct FitResult {
    ModelParameters params;
    double objective_value{0};
    ObjectiveComponents components;
    int iterations{0};
    bool converged{false};
    int restarts_used{0};
};

/**
 * Box-projected Nelder-Mead over the 13 coefficients.
 *
 * Run 0 starts from initial_guess; each of options.restarts further runs starts
 * from a point drawn uniformly in bounds from options.seed. The lowest objective
 * wins, ties broken by run index. A run that integrates to a non-finite state
 * scores +inf at that point.
 */
FitResult fit(const ObservedSeries& obs, const ModelParameters& initial_guess, const ParameterBounds& bounds,
              const FitOptions& options);

/// Integrates, keeps every sample_every-th sample and adds N(0, noise_sd) noise clamped at 0.
ObservedSeries generate_synthetic(const ModelParameters& p, const SystemState& initial, double horizon, double dt,
                                  int sample_every, double noise_sd, std::uint64_t seed);

} // namespace regflow

#endif // REGFLOW_CALIBRATION_HPP
