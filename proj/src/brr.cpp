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
#include "regflow/brr.hpp"

#include "regflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace regflow
{

namespace
{

void require_score(int v, const char* field)
{
    if (v < 1 || v > 10) {
        throw DomainError(field, std::string("score '") + field + "' outside [1, 10]: " + std::to_string(v));
    }
}

} // namespace

void validate(const Submission& s)
{
    require_score(s.safety, "safety");
    require_score(s.effectiveness, "effectiveness");
    require_score(s.compliance, "compliance");
    require_score(s.adverse, "adverse");
}

void validate(const ThresholdConfig& cfg)
{
    const bool finite = std::isfinite(cfg.base) && std::isfinite(cfg.floor) && std::isfinite(cfg.ceiling);
    if (!finite || !(cfg.floor > 0.0) || cfg.floor > cfg.base || cfg.base > cfg.ceiling) {
        throw ArgumentError("threshold config requires 0 < floor <= base <= ceiling");
    }
    if (!(cfg.kappa >= 0.0 && cfg.kappa <= 1.0)) {
        throw ArgumentError("threshold kappa must lie in [0, 1]");
    }
    if (cfg.window < 1) {
        throw ArgumentError("threshold window must be >= 1");
    }
}

double compute_brr(const Submission& s)
{
    if (s.adverse < 1) {
        throw DomainError("adverse", "adverse-event score must be >= 1");
    }
    validate(s);
    return static_cast<double>(s.safety + s.effectiveness + s.compliance) / static_cast<double>(s.adverse);
}

BRRDecision decide(double brr, double threshold)
{
    if (!(brr > 0.0) || !std::isfinite(brr) || !(threshold > 0.0) || !std::isfinite(threshold)) {
        throw ArgumentError("brr and threshold must be positive and finite");
    }
    return {brr, threshold, brr >= threshold};
}

double median(std::span<const double> values)
{
    if (values.empty()) {
        throw ArgumentError("median of an empty sequence");
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double update_threshold(const ThresholdConfig& cfg, std::span<const double> recent_brrs)
{
    validate(cfg);
    if (recent_brrs.empty()) {
        return cfg.base;
    }
    const std::size_t take = std::min(static_cast<std::size_t>(cfg.window), recent_brrs.size());
    const double med = median(recent_brrs.last(take));
    return std::clamp(cfg.base + cfg.kappa * (med - cfg.base), cfg.floor, cfg.ceiling);
}

} // namespace regflow
