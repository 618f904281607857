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
#ifndef REGFLOW_LLM_POLICY_HPP
#define REGFLOW_LLM_POLICY_HPP

#include "regflow/agents.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace regflow
{

/// Environment variable holding the bearer token. Never taken from a flag or file.
inline constexpr const char* api_key_env_var = "REGFLOW_API_KEY";

struct LlmClientConfig {
    std::string endpoint{"http://127.0.0.1:8000"}; ///< scheme://host:port, optionally with a path
    std::string path{"/v1/chat/completions"};      ///< used when endpoint carries no path
    std::string model{"gpt-4o-mini"};
    double timeout_seconds{30.0};
    int retries{2};
    int concurrency{4};
    double temperature{0.0};
};

enum class FailureKind { none, timeout, transport, parse };

std::string_view to_string(FailureKind k);

struct LlmOutcome {
    AgentDecision decision;
    FailureKind failure{FailureKind::none};
    int attempts{0};
    bool clipped{false};
};

/**
 * Renders the prompt, posts one chat-completion request (retrying transport
 * failures up to cfg.retries times) and parses the reply. Any failure falls back
 * to rule_policy_decide with the failure category noted in the rationale.
 */
LlmOutcome llm_policy_decide(const ManufacturerProfile& profile, const std::vector<Regulation>& regulations,
                             const PolicyContext& ctx, const LlmClientConfig& cfg, std::uint64_t seed = 0);

} // namespace regflow

#endif // REGFLOW_LLM_POLICY_HPP
