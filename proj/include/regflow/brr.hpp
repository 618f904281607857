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
#ifndef REGFLOW_BRR_HPP
#define REGFLOW_BRR_HPP

#include <span>
#include <string>
#include <vector>

namespace regflow
{

/// Scores of one compliance submission, each an integer in [1, 10].
struct Submission {
    std::string agent_id;
    int safety{1};
    int effectiveness{1};
    int compliance{1};
    int adverse{1};
    std::vector<std::string> regulation_ids;
    std::string narrative;

    friend bool operator==(const Submission&, const Submission&) = default;
};

/// Throws DomainError if any score lies outside [1, 10].
void validate(const Submission& s);

struct BRRDecision {
    double brr{0};
    double threshold{0};
    bool approved{false};
};

/// Dynamic approval threshold: median tracking with responsiveness kappa, clipped to [floor, ceiling].
struct ThresholdConfig {
    double base{4.0};
    double kappa{0.3};
    int window{10};
    double floor{2.0};
    double ceiling{8.0};
};

/// Throws ArgumentError unless 0 < floor <= base <= ceiling, kappa in [0, 1], window >= 1.
void validate(const ThresholdConfig& cfg);

/// (safety + effectiveness + compliance) / adverse, in [0.3, 30].
double compute_brr(const Submission& s);

/// Approves when brr meets or exceeds the threshold.
BRRDecision decide(double brr, double threshold);

double median(std::span<const double> values);

/// base + kappa * (median(last window values) - base), clipped; base on empty history.
double update_threshold(const ThresholdConfig& cfg, std::span<const double> recent_brrs);

} // namespace regflow

#endif // REGFLOW_BRR_HPP
