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
#include "regflow/llm_policy.hpp"

#include "httplib.h"
#include "json.hpp"

#include <chrono>
#include <cstdlib>

namespace regflow
{

std::string_view to_string(FailureKind k)
{
    switch (k) {
    case FailureKind::none:
        return "none";
    case FailureKind::timeout:
        return "timeout";
    case FailureKind::transport:
        return "transport";
    case FailureKind::parse:
        return "parse";
    }
    return "none";
}

namespace
{

struct SplitUrl {
    std::string origin;
    std::string path;
};

SplitUrl split_endpoint(const std::string& endpoint, const std::string& default_path)
{
    const auto scheme = endpoint.find("://");
    const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = endpoint.find('/', host_start);
    if (slash == std::string::npos || slash + 1 == endpoint.size()) {
        return {endpoint.substr(0, slash), default_path};
    }
    return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

struct Exchange {
    std::optional<std::string> content;
    FailureKind failure{FailureKind::none};
    std::string detail;
};

Exchange post_once(httplib::Client& client, const SplitUrl& url, const std::string& body,
                   const httplib::Headers& headers, double timeout_seconds)
{
    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(url.path, headers, body, "application/json");
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Exchange ex;
    if (!res) {
        const auto err = res.error();
        const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                               (err == httplib::Error::Read && elapsed >= 0.9 * timeout_seconds);
        ex.failure = timed_out ? FailureKind::timeout : FailureKind::transport;
        ex.detail  = httplib::to_string(err);
        return ex;
    }
    if (res->status != 200) {
        ex.failure = FailureKind::transport;
        ex.detail  = "HTTP status " + std::to_string(res->status);
        return ex;
    }

    const auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty()) {
        ex.failure = FailureKind::parse;
        ex.detail  = "response is not a chat completion";
        return ex;
    }
    const auto& choice = doc["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string()) {
        ex.failure = FailureKind::parse;
        ex.detail  = "chat completion has no message content";
        return ex;
    }
    ex.content = choice["message"]["content"].get<std::string>();
    return ex;
}

} // namespace

LlmOutcome llm_policy_decide(const ManufacturerProfile& profile, const std::vector<Regulation>& regulations,
                             const PolicyContext& ctx, const LlmClientConfig& cfg, std::uint64_t seed)
{
    const std::string prompt = render_prompt(profile, regulations, ctx);

    nlohmann::json request = {
        {"model", cfg.model},
        {"temperature", cfg.temperature},
        {"seed", seed},
        {"messages",
         {{{"role", "system"},
           {"content", "You are a manufacturer agent in a regulatory simulation. Answer only with the requested JSON."}},
          {{"role", "user"}, {"content", prompt}}}},
    };
    const std::string body = request.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(api_key_env_var); key != nullptr && *key != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const SplitUrl url = split_endpoint(cfg.endpoint, cfg.path);
    const auto secs    = std::chrono::duration<double>(cfg.timeout_seconds);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(secs);

    LlmOutcome out;
    Exchange ex;
    {
        httplib::Client client(url.origin);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        const int attempts = 1 + std::max(cfg.retries, 0);
        for (int a = 0; a < attempts; ++a) {
            ++out.attempts;
            ex = post_once(client, url, body, headers, cfg.timeout_seconds);
            // only transport-level failures are retried
            if (ex.failure != FailureKind::timeout && ex.failure != FailureKind::transport) {
                break;
            }
        }
    }

    if (ex.content) {
        ReplyParse parsed = parse_llm_reply(*ex.content, profile.id, regulations, ctx.max_step);
        if (parsed) {
            out.decision = std::move(*parsed.decision);
            out.clipped  = parsed.clipped;
            return out;
        }
        ex.failure = FailureKind::parse;
        ex.detail  = parsed.error;
    }

    out.failure  = ex.failure;
    out.decision = rule_policy_decide(profile, regulations, ctx);
    out.decision.rationale =
        "fallback(" + std::string(to_string(ex.failure)) + "): " + ex.detail + "; " + out.decision.rationale;
    return out;
}

} // namespace regflow
