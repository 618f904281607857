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
#include "regflow/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>

namespace regflow
{

void validate(const ObservedSeries& obs)
{
    const std::size_t n = obs.times.size();
    if (n < 2) {
        throw ArgumentError("observed series needs at least two rows");
    }
    if (obs.g_obs.size() != n || obs.c_obs.size() != n || obs.m_obs.size() != n || obs.f_obs.size() != n) {
        throw ArgumentError("observed series columns differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(obs.times[i]) || (i > 0 && !(obs.times[i] > obs.times[i - 1]))) {
            throw ArgumentError("observed times must be finite and strictly increasing");
        }
    }
    const std::pair<const char*, const std::vector<double>*> columns[] = {
        {"t", &obs.times}, {"G", &obs.g_obs}, {"C", &obs.c_obs}, {"M", &obs.m_obs}, {"F", &obs.f_obs}};
    for (const auto& [name, column] : columns) {
        for (double v : *column) {
            if (!std::isfinite(v) || v < 0.0) {
                throw DomainError(name, std::string("observed ") + name + " must be finite and nonnegative");
            }
        }
    }
}

ParameterBounds ParameterBounds::defaults()
{
    ParameterBounds b;
    for (std::size_t i = 0; i < num_parameters; ++i) {
        b.lo[i] = 0.0;
        b.hi[i] = parameter_names[i].starts_with("phi") ? 5.0 : 10.0;
    }
    return b;
}

ModelParameters ParameterBounds::clip(const ModelParameters& p) const
{
    ModelParameters out;
    for (std::size_t i = 0; i < num_parameters; ++i) {
        out[i] = std::clamp(p[i], lo[i], hi[i]);
    }
    return out;
}

bool ParameterBounds::contains(const ModelParameters& p) const
{
    for (std::size_t i = 0; i < num_parameters; ++i) {
        if (!(p[i] >= lo[i] && p[i] <= hi[i])) {
            return false;
        }
    }
    return true;
}

void validate(const ParameterBounds& bounds)
{
    for (std::size_t i = 0; i < num_parameters; ++i) {
        const double lo = bounds.lo[i], hi = bounds.hi[i];
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || lo > hi) {
            throw ArgumentError("invalid bounds for '" + std::string(parameter_names[i]) + "'");
        }
    }
}

ObjectiveComponents residuals(const Trajectory& predicted, const ObservedSeries& obs)
{
    validate(obs);
    if (predicted.samples.empty() || !(predicted.dt > 0.0)) {
        throw ArgumentError("empty prediction");
    }
    const double t0 = predicted.samples.front().state.t;
    ObjectiveComponents e;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double pos = (obs.times[i] - t0) / predicted.dt;
        if (pos < -0.5) {
            throw ArgumentError("observed time precedes the integration start");
        }
        const auto idx = static_cast<std::size_t>(std::llround(std::max(pos, 0.0)));
        if (idx >= predicted.samples.size()) {
            throw ArgumentError("observed time " + std::to_string(obs.times[i]) + " beyond integration horizon");
        }
        const auto& s = predicted.samples[idx];
        const double rg = obs.g_obs[i] - s.state.g;
        const double rc = obs.c_obs[i] - s.state.c;
        const double rm = obs.m_obs[i] - s.state.m;
        const double rf = obs.f_obs[i] - s.f;
        e.e_g += rg * rg;
        e.e_c += rc * rc;
        e.e_m += rm * rm;
        e.e_f += rf * rf;
    }
    return e;
}

ObjectiveComponents objective(const ModelParameters& p, const ObservedSeries& obs, double dt)
{
    validate(obs);
    const SystemState initial{obs.times.front(), obs.g_obs.front(), obs.c_obs.front(), obs.m_obs.front()};
    const double horizon = std::max(obs.times.back() - obs.times.front(), dt);
    return residuals(integrate(initial, p, horizon, dt), obs);
}

namespace
{

using Vec = Eigen::VectorXd;

struct RunOutcome {
    ModelParameters params;
    double value{std::numeric_limits<double>::infinity()};
    int iterations{0};
    bool converged{false};
};

class BoxNelderMead
{
public:
    BoxNelderMead(const ObservedSeries& obs, const ParameterBounds& bounds, const FitOptions& opts)
        : obs_(obs)
        , bounds_(bounds)
        , opts_(opts)
    {
        for (std::size_t i = 0; i < num_parameters; ++i) {
            if (bounds.hi[i] > bounds.lo[i]) {
                free_.push_back(i);
            }
        }
    }

    RunOutcome run(const ModelParameters& start) const
    {
        RunOutcome out;
        const auto n = static_cast<Eigen::Index>(free_.size());
        if (n == 0) {
            out.params = start;
            out.value  = evaluate(start, Vec());
            out.converged = true;
            return out;
        }

        const ModelParameters base = bounds_.clip(start);
        const double dim = static_cast<double>(n);
        // dimension-adaptive coefficients (Gao & Han)
        const double rho = 1.0, chi = 1.0 + 2.0 / dim, psi = 0.75 - 1.0 / (2.0 * dim), sigma = 1.0 - 1.0 / dim;

        std::vector<Vec> simplex(static_cast<std::size_t>(n) + 1, Vec(n));
        std::vector<double> values(simplex.size());
        for (Eigen::Index j = 0; j < n; ++j) {
            simplex[0](j) = base[free_[static_cast<std::size_t>(j)]];
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            const std::size_t k = free_[static_cast<std::size_t>(j)];
            Vec v = simplex[0];
            const double span = bounds_.hi[k] - bounds_.lo[k];
            double step = v(j) != 0.0 ? 0.05 * std::abs(v(j)) : 0.00025 * span;
            if (v(j) + step > bounds_.hi[k]) {
                step = -step;
            }
            v(j) += step;
            simplex[static_cast<std::size_t>(j) + 1] = project(v);
        }
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            values[i] = evaluate(base, simplex[i]);
        }

        std::vector<std::size_t> order(simplex.size());
        int iter = 0;
        while (true) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
            reorder(simplex, values, order);

            if (has_converged(simplex, values)) {
                out.converged = true;
                break;
            }
            if (iter >= opts_.max_iter) {
                break;
            }
            ++iter;

            const std::size_t worst = simplex.size() - 1;
            Vec centroid = Vec::Zero(n);
            for (std::size_t i = 0; i < worst; ++i) {
                centroid += simplex[i];
            }
            centroid /= dim;

            const Vec xr = project(centroid + rho * (centroid - simplex[worst]));
            const double fr = evaluate(base, xr);
            if (fr < values[0]) {
                const Vec xe = project(centroid + chi * (xr - centroid));
                const double fe = evaluate(base, xe);
                if (fe < fr) {
                    simplex[worst] = xe;
                    values[worst]  = fe;
                }
                else {
                    simplex[worst] = xr;
                    values[worst]  = fr;
                }
                continue;
            }
            if (fr < values[worst - 1]) {
                simplex[worst] = xr;
                values[worst]  = fr;
                continue;
            }
            const bool outside = fr < values[worst];
            const Vec xc = outside ? project(centroid + psi * (xr - centroid))
                                   : project(centroid - psi * (centroid - simplex[worst]));
            const double fc = evaluate(base, xc);
            if (fc < (outside ? fr : values[worst])) {
                simplex[worst] = xc;
                values[worst]  = fc;
                continue;
            }
            for (std::size_t i = 1; i < simplex.size(); ++i) {
                simplex[i] = project(simplex[0] + sigma * (simplex[i] - simplex[0]));
                values[i]  = evaluate(base, simplex[i]);
            }
        }

        out.params     = assemble(base, simplex[0]);
        out.value      = values[0];
        out.iterations = iter;
        return out;
    }

private:
    Vec project(Vec v) const
    {
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            const std::size_t k = free_[static_cast<std::size_t>(j)];
            v(j) = std::clamp(v(j), bounds_.lo[k], bounds_.hi[k]);
        }
        return v;
    }

    ModelParameters assemble(const ModelParameters& base, const Vec& v) const
    {
        ModelParameters p = base;
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            p[free_[static_cast<std::size_t>(j)]] = v(j);
        }
        return p;
    }

    double evaluate(const ModelParameters& base, const Vec& v) const
    {
        try {
            const double value = objective(assemble(base, v), obs_, opts_.dt).total();
            return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
        }
        catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    }

    bool has_converged(const std::vector<Vec>& simplex, const std::vector<double>& values) const
    {
        if (values.back() - values.front() < opts_.tol) {
            return true;
        }
        double xspread = 0.0;
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            xspread = std::max(xspread, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
        }
        return xspread < opts_.tol;
    }

    static void reorder(std::vector<Vec>& simplex, std::vector<double>& values, const std::vector<std::size_t>& order)
    {
        std::vector<Vec> s2;
        std::vector<double> v2;
        s2.reserve(order.size());
        v2.reserve(order.size());
        for (std::size_t i : order) {
            s2.push_back(std::move(simplex[i]));
            v2.push_back(values[i]);
        }
        simplex = std::move(s2);
        values  = std::move(v2);
    }

    const ObservedSeries& obs_;
    const ParameterBounds& bounds_;
    const FitOptions& opts_;
    std::vector<std::size_t> free_;
};

} // namespace

FitResult fit(const ObservedSeries& obs, const ModelParameters& initial_guess, const ParameterBounds& bounds,
              const FitOptions& options)
{
    validate(obs);
    validate(bounds);
    if (!bounds.contains(initial_guess)) {
        throw ArgumentError("initial guess lies outside the bounds");
    }
    if (options.max_iter < 0 || options.restarts < 0 || !(options.tol >= 0.0) || !(options.dt > 0.0)) {
        throw ArgumentError("invalid fit options");
    }

    std::vector<ModelParameters> starts{initial_guess};
    std::mt19937_64 rng(options.seed);
    for (int r = 0; r < options.restarts; ++r) {
        ModelParameters p;
        for (std::size_t i = 0; i < num_parameters; ++i) {
            std::uniform_real_distribution<double> u(bounds.lo[i], bounds.hi[i]);
            p[i] = bounds.hi[i] > bounds.lo[i] ? u(rng) : bounds.lo[i];
        }
        starts.push_back(p);
    }

    const BoxNelderMead solver(obs, bounds, options);
    std::vector<std::future<RunOutcome>> runs;
    runs.reserve(starts.size());
    for (const auto& s : starts) {
        runs.push_back(std::async(std::launch::async, [&solver, s] { return solver.run(s); }));
    }

    std::vector<RunOutcome> outcomes;
    outcomes.reserve(runs.size());
    for (auto& r : runs) {
        outcomes.push_back(r.get());
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < outcomes.size(); ++i) {
        if (outcomes[i].value < outcomes[best].value) {
            best = i;
        }
    }

    FitResult result;
    result.params        = outcomes[best].params;
    result.components    = objective(result.params, obs, options.dt);
    result.objective_value = result.components.total();
    result.iterations    = outcomes[best].iterations;
    result.converged     = outcomes[best].converged;
    result.restarts_used = options.restarts;
    return result;
}

ObservedSeries generate_synthetic(const ModelParameters& p, const SystemState& initial, double horizon, double dt,
                                  int sample_every, double noise_sd, std::uint64_t seed)
{
    if (sample_every < 1 || !(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw ArgumentError("sample_every must be >= 1 and noise_sd finite and >= 0");
    }
    const Trajectory traj = integrate(initial, p, horizon, dt);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
    const auto perturb = [&](double v) { return noise_sd > 0.0 ? std::max(0.0, v + noise(rng)) : v; };

    ObservedSeries obs;
    for (std::size_t k = 0; k < traj.samples.size(); k += static_cast<std::size_t>(sample_every)) {
        const auto& s = traj.samples[k];
        obs.times.push_back(s.state.t);
        obs.g_obs.push_back(perturb(s.state.g));
        obs.c_obs.push_back(perturb(s.state.c));
        obs.m_obs.push_back(perturb(s.state.m));
        obs.f_obs.push_back(perturb(s.f));
    }
    return obs;
}

} // namespace regflow
