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
#ifndef REGFLOW_STUB_SERVER_HPP
#define REGFLOW_STUB_SERVER_HPP

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace regflow::test
{

/// Local chat-completions endpoint with a scripted behaviour.
class StubServer
{
public:
    enum class Mode { reply, garbage, stall, error_status, raw_body };

    StubServer()
    {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            ++hits_;
            {
                std::lock_guard lock(mutex_);
                requests_.push_back(req.body);
                auth_.push_back(req.get_header_value("Authorization"));
            }
            switch (mode_.load()) {
            case Mode::reply:
                res.set_content(completion(content()), "application/json");
                break;
            case Mode::garbage:
                res.set_content(completion("I think you should comply, probably."), "application/json");
                break;
            case Mode::stall:
                std::this_thread::sleep_for(stall_);
                res.set_content(completion(content()), "application/json");
                break;
            case Mode::error_status:
                res.status = 503;
                res.set_content("unavailable", "text/plain");
                break;
            case Mode::raw_body:
                res.set_content(content(), "application/json");
                break;
            }
        });
        port_   = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer()
    {
        server_.stop();
        thread_.join();
    }

    StubServer(const StubServer&)            = delete;
    StubServer& operator=(const StubServer&) = delete;

    std::string endpoint() const
    {
        return "http://127.0.0.1:" + std::to_string(port_);
    }

    void set_mode(Mode m)
    {
        mode_ = m;
    }
    void set_content(std::string c)
    {
        std::lock_guard lock(mutex_);
        content_ = std::move(c);
    }
    void set_stall(std::chrono::milliseconds d)
    {
        stall_ = d;
    }

    int hits() const
    {
        return hits_.load();
    }
    void reset_hits()
    {
        hits_ = 0;
    }
    std::vector<std::string> requests() const
    {
        std::lock_guard lock(mutex_);
        return requests_;
    }
    std::vector<std::string> authorizations() const
    {
        std::lock_guard lock(mutex_);
        return auth_;
    }

    static std::string completion(const std::string& text)
    {
        const nlohmann::json doc = {
            {"id", "stub"},
            {"object", "chat.completion"},
            {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", text}}}}}}};
        return doc.dump();
    }

private:
    std::string content() const
    {
        std::lock_guard lock(mutex_);
        return content_;
    }

    httplib::Server server_;
    std::thread thread_;
    int port_{0};
    std::atomic<Mode> mode_{Mode::reply};
    std::atomic<int> hits_{0};
    std::chrono::milliseconds stall_{1000};
    mutable std::mutex mutex_;
    std::string content_;
    std::vector<std::string> requests_;
    std::vector<std::string> auth_;
};

} // namespace regflow::test

#endif // REGFLOW_STUB_SERVER_HPP
