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
#ifndef REGFLOW_CORPUS_HPP
#define REGFLOW_CORPUS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace regflow
{

enum class Strictness { strict, lenient };

std::string_view to_string(Strictness s);
std::optional<Strictness> parse_strictness(std::string_view text);

struct Regulation {
    std::string id;
    Strictness strictness{Strictness::strict};
    std::string title;
    std::string body;
    std::string topic;

    friend bool operator==(const Regulation&, const Regulation&) = default;
};

using Corpus = std::vector<Regulation>;

/// Exposure schedule: strict_steps of strict regulations, then lenient_steps of lenient ones.
struct Schedule {
    int strict_steps{10};
    int lenient_steps{5};
    bool cycle{true};
};

void validate(const Schedule& s);

/// Throws ArgumentError on an empty corpus or duplicate ids.
void validate(const Corpus& corpus);

/// Five strict and five lenient regulations over five AI-device topics.
Corpus build_default_corpus();

Strictness active_phase(int t, const Schedule& s);

/// Regulations of the phase active at step t, in corpus order.
std::vector<Regulation> regulations_for(int t, const Corpus& corpus, const Schedule& s);

} // namespace regflow

#endif // REGFLOW_CORPUS_HPP
