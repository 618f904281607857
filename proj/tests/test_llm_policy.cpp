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

#include "stub_server.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>

using namespace regflow;
using test::StubServer;

namespace
{

const char* well_formed = R"({"comply": true, "adjustments": {"alpha2": 0.03, "beta2": -0.02},
  "safety": 8, "effectiveness": 7, "compliance": 9, "adverse": 4, "rationale": "strengthen documentation"})";

std::vector<Regulation> strict_regs()
{
    std::vector<Regulation> out;
    for (const auto& r : build_default_corpus()) {
        if (r.strictness == Strictness::strict) {
            out.push_back(r);
        }
    }
    return out;
}

PolicyContext context()
{
    PolicyContext ctx;
    ctx.state  = SystemState{0, 1, 0.5, 0.2};
    ctx.params = test::reference_parameters();
    return ctx;
}

LlmClientConfig client_for(const StubServer& stub, double timeout = 2.0, int retries = 2)
{
    LlmClientConfig cfg;
    cfg.endpoint        = stub.endpoint();
    cfg.timeout_seconds = timeout;
    cfg.retries         = retries;
    return cfg;
}

} // namespace

TEST(LlmPolicy, FixedReplyIsUsedVerbatim)
{
    StubServer stub;
    stub.set_content(well_formed);
    const auto profile = default_profiles().front();
    const auto out     = llm_policy_decide(profile, strict_regs(), context(), client_for(stub));
    EXPECT_EQ(out.failure, FailureKind::none);
    EXPECT_EQ(out.attempts, 1);
    EXPECT_EQ(stub.hits(), 1);
    EXPECT_FALSE(out.clipped);
    EXPECT_TRUE(out.decision.comply);
    EXPECT_EQ(out.decision.rationale, "strengthen documentation");
    EXPECT_EQ(out.decision.adjustments.deltas, (std::map<std::string, double>{{"alpha2", 0.03}, {"beta2", -0.02}}));
    ASSERT_TRUE(out.decision.submission);
    EXPECT_EQ(out.decision.submission->agent_id, profile.id);
    EXPECT_EQ(out.decision.submission->safety, 8);
    EXPECT_EQ(out.decision.submission->adverse, 4);
}

TEST(LlmPolicy, RequestCarriesModelAndPrompt)
{
    StubServer stub;
    stub.set_content(well_formed);
    auto cfg           = client_for(stub);
    cfg.model          = "stub-model";
    const auto profile = default_profiles().front();
    llm_policy_decide(profile, strict_regs(), context(), cfg, 42);
    const auto requests = stub.requests();
    ASSERT_EQ(requests.size(), 1u);
    const auto doc = nlohmann::json::parse(requests[0]);
    EXPECT_EQ(doc.at("model"), "stub-model");
    EXPECT_EQ(doc.at("seed"), 42);
    const auto& messages = doc.at("messages");
    ASSERT_EQ(messages.size(), 2u);
    EXPECT_EQ(messages[1].at("role"), "user");
    EXPECT_EQ(messages[1].at("content"), render_prompt(profile, strict_regs(), context()));
}

TEST(LlmPolicy, ApiKeyComesFromEnvironment)
{
    StubServer stub;
    stub.set_content(well_formed);
    ::unsetenv(api_key_env_var);
    llm_policy_decide(default_profiles().front(), strict_regs(), context(), client_for(stub));
    ::setenv(api_key_env_var, "secret-token", 1);
    llm_policy_decide(default_profiles().front(), strict_regs(), context(), client_for(stub));
    ::unsetenv(api_key_env_var);
    const auto auth = stub.authorizations();
    ASSERT_EQ(auth.size(), 2u);
    EXPECT_EQ(auth[0], "");
    EXPECT_EQ(auth[1], "Bearer secret-token");
}

TEST(LlmPolicy, OutOfRangeScoresAreClipped)
{
    StubServer stub;
    stub.set_content(R"({"comply": true, "adjustments": {"alpha1": 0.4}, "safety": 15, "effectiveness": 7,
                         "compliance": 9, "adverse": 0, "rationale": "bold"})");
    const auto out = llm_policy_decide(default_profiles().front(), strict_regs(), context(), client_for(stub));
    EXPECT_EQ(out.failure, FailureKind::none);
    EXPECT_TRUE(out.clipped);
    EXPECT_EQ(out.decision.submission->safety, 10);
    EXPECT_EQ(out.decision.submission->adverse, 1);
    EXPECT_EQ(out.decision.adjustments.deltas.at("alpha1"), default_max_step);
}

TEST(LlmPolicy, GarbageFallsBackToRules)
{
    StubServer stub;
    stub.set_mode(StubServer::Mode::garbage);
    const auto profile = default_profiles().front();
    const auto out     = llm_policy_decide(profile, strict_regs(), context(), client_for(stub));
    EXPECT_EQ(out.failure, FailureKind::parse);
    EXPECT_EQ(out.attempts, 1);
    const auto rule = rule_policy_decide(profile, strict_regs(), context());
    EXPECT_EQ(out.decision.adjustments, rule.adjustments);
    EXPECT_EQ(out.decision.submission, rule.submission);
    EXPECT_EQ(out.decision.rationale.rfind("fallback(parse)", 0), 0u);
    EXPECT_NE(out.decision.rationale.find(rule.rationale), std::string::npos);
}

TEST(LlmPolicy, MalformedCompletionIsParseFailure)
{
    StubServer stub;
    stub.set_mode(StubServer::Mode::raw_body);
    stub.set_content(R"({"choices": []})");
    const auto out = llm_policy_decide(default_profiles().front(), strict_regs(), context(), client_for(stub));
    EXPECT_EQ(out.failure, FailureKind::parse);
    EXPECT_EQ(out.attempts, 1);
}

TEST(LlmPolicy, TimeoutRetriesExactly)
{
    StubServer stub;
    stub.set_mode(StubServer::Mode::stall);
    stub.set_stall(std::chrono::milliseconds(700));
    stub.set_content(well_formed);
    const auto start = std::chrono::steady_clock::now();
    const auto out   = llm_policy_decide(default_profiles().front(), strict_regs(), context(), client_for(stub, 0.2, 2));
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(out.failure, FailureKind::timeout);
    EXPECT_EQ(out.attempts, 3);
    EXPECT_EQ(stub.hits(), 3);
    EXPECT_EQ(out.decision.rationale.rfind("fallback(timeout)", 0), 0u);
    EXPECT_LT(elapsed, 3 * 0.2 + 1.0);
}

TEST(LlmPolicy, ErrorStatusRetriesAsTransport)
{
    StubServer stub;
    stub.set_mode(StubServer::Mode::error_status);
    const auto out = llm_policy_decide(default_profiles().front(), strict_regs(), context(), client_for(stub, 2.0, 1));
    EXPECT_EQ(out.failure, FailureKind::transport);
    EXPECT_EQ(out.attempts, 2);
    EXPECT_EQ(stub.hits(), 2);
}

TEST(LlmPolicy, UnreachableEndpointFallsBack)
{
    int port = 0;
    {
        // grab a free port, then release it so nothing listens there
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    LlmClientConfig cfg;
    cfg.endpoint        = "http://127.0.0.1:" + std::to_string(port);
    cfg.timeout_seconds = 0.5;
    cfg.retries         = 0;
    const auto out      = llm_policy_decide(default_profiles().front(), strict_regs(), context(), cfg);
    EXPECT_NE(out.failure, FailureKind::none);
    EXPECT_NE(out.failure, FailureKind::parse);
    EXPECT_EQ(out.attempts, 1);
    EXPECT_TRUE(out.decision.submission);
}

TEST(LlmPolicy, EndpointWithExplicitPath)
{
    StubServer stub;
    stub.set_content(well_formed);
    auto cfg     = client_for(stub);
    cfg.endpoint = stub.endpoint() + "/v1/chat/completions";
    cfg.path     = "/ignored";
    EXPECT_EQ(llm_policy_decide(default_profiles().front(), strict_regs(), context(), cfg).failure, FailureKind::none);
}
