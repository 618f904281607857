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
#ifndef REGFLOW_DYNAMICS_HPP
#define REGFLOW_DYNAMICS_HPP

#include "regflow/errors.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace regflow
{

inline constexpr std::size_t num_parameters = 13;

/// Coefficient names in storage order.
inline constexpr std::array<std::string_view, num_parameters> parameter_names = {
    "alpha1", "alpha2", "alpha3", "alpha4", "phi1",   "phi2",  "phi3",
    "phi4",   "beta1",  "beta2",  "beta3",  "gamma1", "gamma2"};

/// Index of a coefficient by name, or nullopt if the name is unknown.
inline std::optional<std::size_t> parameter_index(std::string_view name)
{
    for (std::size_t i = 0; i < parameter_names.size(); ++i) {
        if (parameter_names[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

template <typename Scalar>
using ParameterVector = Eigen::Matrix<Scalar, static_cast<int>(num_parameters), 1>;

/// (g, c, m) in that order.
template <typename Scalar>
using StateVector = Eigen::Matrix<Scalar, 3, 1>;

/**
 * Coefficients of the guidance/compliance/market/feedback system.
 *
 * alpha: gains, phi: saturation rates, beta: damping, gamma: dilution.
 * All coefficients must be finite and non-negative.
 */
template <typename Scalar>
struct ModelParametersT {
    Scalar alpha1{0}, alpha2{0}, alpha3{0}, alpha4{0};
    Scalar phi1{0}, phi2{0}, phi3{0}, phi4{0};
    Scalar beta1{0}, beta2{0}, beta3{0};
    Scalar gamma1{0}, gamma2{0};

    Scalar& operator[](std::size_t i)
    {
        return this->*members()[i];
    }
    const Scalar& operator[](std::size_t i) const
    {
        return this->*members()[i];
    }

    ParameterVector<Scalar> to_vector() const
    {
        ParameterVector<Scalar> v;
        for (std::size_t i = 0; i < num_parameters; ++i) {
            v(static_cast<Eigen::Index>(i)) = (*this)[i];
        }
        return v;
    }

    static ModelParametersT from_vector(const ParameterVector<Scalar>& v)
    {
        ModelParametersT p;
        for (std::size_t i = 0; i < num_parameters; ++i) {
            p[i] = v(static_cast<Eigen::Index>(i));
        }
        return p;
    }

    friend bool operator==(const ModelParametersT&, const ModelParametersT&) = default;

private:
    using Member = Scalar ModelParametersT::*;
    static const std::array<Member, num_parameters>& members()
    {
        static const std::array<Member, num_parameters> m = {
            &ModelParametersT::alpha1, &ModelParametersT::alpha2, &ModelParametersT::alpha3,
            &ModelParametersT::alpha4, &ModelParametersT::phi1,   &ModelParametersT::phi2,
            &ModelParametersT::phi3,   &ModelParametersT::phi4,   &ModelParametersT::beta1,
            &ModelParametersT::beta2,  &ModelParametersT::beta3,  &ModelParametersT::gamma1,
            &ModelParametersT::gamma2};
        return m;
    }
};

template <typename Scalar>
struct SystemStateT {
    Scalar t{0};
    Scalar g{0}; ///< guidance issuance level
    Scalar c{0}; ///< compliance effort
    Scalar m{0}; ///< market adaptation

    StateVector<Scalar> vector() const
    {
        return StateVector<Scalar>(g, c, m);
    }

    friend bool operator==(const SystemStateT&, const SystemStateT&) = default;
};

template <typename Scalar>
struct TrajectorySampleT {
    SystemStateT<Scalar> state;
    Scalar f{0}; ///< feedback evaluated at state
};

template <typename Scalar>
struct TrajectoryT {
    std::vector<TrajectorySampleT<Scalar>> samples;
    Scalar dt{0};
    std::size_t clamp_events{0};
};

using ModelParameters  = ModelParametersT<double>;
using SystemState      = SystemStateT<double>;
using TrajectorySample = TrajectorySampleT<double>;
using Trajectory       = TrajectoryT<double>;

namespace detail
{

template <typename Scalar>
void require_finite(Scalar v, std::string_view field)
{
    using std::isfinite;
    if (!isfinite(v)) {
        throw DomainError(std::string(field), "non-finite value in '" + std::string(field) + "'");
    }
}

template <typename Scalar>
void require_nonneg(Scalar v, std::string_view field)
{
    require_finite(v, field);
    if (v < Scalar(0)) {
        throw DomainError(std::string(field), "negative value in '" + std::string(field) + "'");
    }
}

} // namespace detail

/// Throws DomainError naming the first coefficient that is non-finite or negative.
template <typename Scalar>
void validate(const ModelParametersT<Scalar>& p)
{
    for (std::size_t i = 0; i < num_parameters; ++i) {
        detail::require_nonneg(p[i], parameter_names[i]);
    }
}

/// Throws DomainError naming the first state component that is non-finite or negative.
template <typename Scalar>
void validate(const SystemStateT<Scalar>& s)
{
    detail::require_nonneg(s.t, "t");
    detail::require_nonneg(s.g, "g");
    detail::require_nonneg(s.c, "c");
    detail::require_nonneg(s.m, "m");
}

namespace detail
{

template <typename Scalar>
Scalar feedback_unchecked(Scalar c, Scalar m, const ModelParametersT<Scalar>& p)
{
    using std::expm1;
    // 1 - e^{-x} == -expm1(-x), accurate for small x
    return p.alpha4 * (m * -expm1(-p.phi4 * c) / (Scalar(1) + p.gamma2 * c));
}

template <typename Scalar>
StateVector<Scalar> derivatives_unchecked(Scalar t, const StateVector<Scalar>& y, const ModelParametersT<Scalar>& p)
{
    using std::expm1;
    const Scalar g = y(0), c = y(1), m = y(2);
    const Scalar f = feedback_unchecked(c, m, p);
    StateVector<Scalar> d;
    d(0) = p.alpha1 * -expm1(-p.phi1 * t) - p.beta1 * f;
    d(1) = p.alpha2 * g * -expm1(-p.phi2 * c) - p.beta2 * (c / (Scalar(1) + p.gamma1 * m));
    d(2) = p.alpha3 * c * -expm1(-p.phi3 * g) - p.beta3 * m;
    return d;
}

} // namespace detail

/// Manufacturer feedback F = alpha4 * m (1 - e^{-phi4 c}) / (1 + gamma2 c). Bounded by alpha4 * m.
template <typename Scalar>
Scalar eval_feedback(const SystemStateT<Scalar>& state, const ModelParametersT<Scalar>& p)
{
    validate(state);
    validate(p);
    return detail::feedback_unchecked(state.c, state.m, p);
}

/// Right-hand side (dg, dc, dm) at the given state; feedback enters dg instantaneously.
template <typename Scalar>
StateVector<Scalar> eval_derivatives(const SystemStateT<Scalar>& state, const ModelParametersT<Scalar>& p)
{
    validate(state);
    validate(p);
    return detail::derivatives_unchecked(state.t, state.vector(), p);
}

/**
 * One classical RK4 step of size dt.
 *
 * Stage states are projected onto the non-negative orthant before the right-hand
 * side is evaluated, and each output component is clamped at 0. Every clamped
 * output component increments clamp_events.
 */
template <typename Scalar>
SystemStateT<Scalar> step_rk4(const SystemStateT<Scalar>& state, const ModelParametersT<Scalar>& p, Scalar dt,
                              std::size_t& clamp_events)
{
    using std::isfinite;
    if (!(dt > Scalar(0)) || !isfinite(dt)) {
        throw ArgumentError("step size must be positive and finite");
    }
    validate(state);
    validate(p);

    const auto rhs = [&p](Scalar t, const StateVector<Scalar>& y) {
        return detail::derivatives_unchecked<Scalar>(t, y.cwiseMax(Scalar(0)), p);
    };
    const Scalar half = dt / Scalar(2);
    const StateVector<Scalar> y0 = state.vector();
    const StateVector<Scalar> k1 = rhs(state.t, y0);
    const StateVector<Scalar> k2 = rhs(state.t + half, y0 + half * k1);
    const StateVector<Scalar> k3 = rhs(state.t + half, y0 + half * k2);
    const StateVector<Scalar> k4 = rhs(state.t + dt, y0 + dt * k3);
    StateVector<Scalar> y1 = y0 + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);

    for (int i = 0; i < 3; ++i) {
        if (!isfinite(y1(i))) {
            throw DomainError(i == 0 ? "g" : i == 1 ? "c" : "m", "RK4 step produced a non-finite state");
        }
        if (y1(i) < Scalar(0)) {
            y1(i) = Scalar(0);
            ++clamp_events;
        }
    }
    return {state.t + dt, y1(0), y1(1), y1(2)};
}

template <typename Scalar>
SystemStateT<Scalar> step_rk4(const SystemStateT<Scalar>& state, const ModelParametersT<Scalar>& p, Scalar dt)
{
    std::size_t ignored = 0;
    return step_rk4(state, p, dt, ignored);
}

inline constexpr double max_integration_steps = 1e7;

/// Number of RK4 steps needed to cover horizon with step dt, i.e. ceil(horizon / dt).
template <typename Scalar>
std::size_t step_count(Scalar horizon, Scalar dt)
{
    using std::ceil;
    using std::isfinite;
    if (!(dt > Scalar(0)) || !isfinite(dt) || !isfinite(horizon)) {
        throw ArgumentError("step size and horizon must be positive and finite");
    }
    if (horizon < dt) {
        throw ArgumentError("horizon must be at least one step");
    }
    const double ratio = static_cast<double>(horizon / dt);
    if (ratio > max_integration_steps) {
        throw ArgumentError("horizon/dt exceeds the maximum of 1e7 steps");
    }
    // tolerate representation error such as 10 / 0.01 = 1000.0000000000001
    return static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
}

/**
 * Integrates from initial over horizon with fixed step dt.
 *
 * Returns step_count(horizon, dt) + 1 samples at t0 + k*dt, each carrying its
 * feedback value. A non-finite intermediate result raises NumericalError with
 * the failing step index.
 */
template <typename Scalar>
TrajectoryT<Scalar> integrate(const SystemStateT<Scalar>& initial, const ModelParametersT<Scalar>& p, Scalar horizon,
                              Scalar dt)
{
    const std::size_t n = step_count(horizon, dt);
    validate(initial);
    validate(p);

    TrajectoryT<Scalar> traj;
    traj.dt = dt;
    traj.samples.reserve(n + 1);
    traj.samples.push_back({initial, detail::feedback_unchecked(initial.c, initial.m, p)});

    SystemStateT<Scalar> s = initial;
    for (std::size_t k = 0; k < n; ++k) {
        try {
            s = step_rk4(s, p, dt, traj.clamp_events);
        }
        catch (const DomainError& e) {
            throw NumericalError(k, e.what());
        }
        s.t = initial.t + static_cast<Scalar>(k + 1) * dt;
        const Scalar f = detail::feedback_unchecked(s.c, s.m, p);
        using std::isfinite;
        if (!isfinite(f)) {
            throw NumericalError(k, "non-finite feedback");
        }
        traj.samples.push_back({s, f});
    }
    return traj;
}

} // namespace regflow

#endif // REGFLOW_DYNAMICS_HPP
