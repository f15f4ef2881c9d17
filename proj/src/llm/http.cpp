// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <thread>

#include "solomon/llm/backend.hpp"

namespace solomon::llm {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw BackendError(LlmErrc::config_error, "backend url '" + url + "' has no scheme");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpChatBackend::HttpChatBackend(BackendConfig config, Sleeper sleeper)
    : config_(std::move(config)),
      sleeper_(std::move(sleeper)),
      bucket_(config_.requests_per_second, config_.burst),
      gate_(config_.in_flight_limit) {
    if (config_.url.empty()) throw BackendError(LlmErrc::config_error, "backend '" + config_.id + "' has no url");
    split_url(config_.url);
    if (!config_.auth_env.empty()) {
        const char* value = std::getenv(config_.auth_env.c_str());
        if (!value || !*value)
            throw BackendError(LlmErrc::config_error, "backend '" + config_.id + "' needs credentials in environment variable " +
                                                          config_.auth_env);
        credential_ = value;
    }
    if (!sleeper_) sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
}

nlohmann::json HttpChatBackend::wire_body(const ChatRequest& req) const {
    nlohmann::json messages = nlohmann::json::array();
    if (!req.system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", req.system_prompt}});
    for (const auto& m : req.messages) {
        if (m.images.empty()) {
            messages.push_back({{"role", m.role}, {"content", m.text}});
            continue;
        }
        nlohmann::json parts = nlohmann::json::array();
        parts.push_back({{"type", "text"}, {"text", m.text}});
        for (const auto& img : m.images)
            parts.push_back(
                {{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64_encode(img)}}}});
        messages.push_back({{"role", m.role}, {"content", parts}});
    }
    return {
        {"model", config_.model},
        {"messages", messages},
        {"temperature", req.temperature},
        {"max_tokens", req.max_output_tokens},
    };
}

ChatResponse HttpChatBackend::complete(const ChatRequest& req) {
    req.validate();
    std::vector<std::string> warnings;
    const ChatRequest sent = apply_image_policy(req, config_.supports_images, config_.image_policy, warnings);
    const std::string body = wire_body(sent).dump();
    const Endpoint ep = split_url(config_.url);

    httplib::Headers headers;
    if (!credential_.empty()) headers.emplace(config_.auth_header, config_.auth_prefix + credential_);

    gate_.acquire();
    struct Release {
        InFlightGate& g;
        ~Release() { g.release(); }
    } release{gate_};

    const auto start = std::chrono::steady_clock::now();
    std::string last_error;
    double backoff = config_.backoff_initial_seconds;
    int attempts = 0;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            sleeper_(backoff);
            backoff *= 2;
        }
        bucket_.acquire();
        ++attempts;
        httplib::Client client(ep.origin);
        const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        const auto res = client.Post(ep.path, headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            if (retryable(res->status)) continue;
            last_attempts_ = attempts;
            throw BackendError(LlmErrc::backend_unavailable, "backend '" + config_.id + "' answered " + last_error);
        }
        last_attempts_ = attempts;
        ChatResponse out;
        try {
            const auto j = nlohmann::json::parse(res->body);
            const auto& content = j.at("choices").at(0).at("message").at("content");
            out.text = content.is_string() ? content.get<std::string>() : std::string{};
            if (j.contains("usage")) {
                out.usage.prompt = j["usage"].value("prompt_tokens", 0);
                out.usage.completion = j["usage"].value("completion_tokens", 0);
            }
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(LlmErrc::backend_unavailable,
                               "backend '" + config_.id + "' returned an unreadable body: " + e.what());
        }
        if (out.text.empty()) {
            out.error = true;
            out.error_message = "empty completion";
        }
        out.backend_id = config_.id;
        out.content_digest = digest(sent);
        out.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.warnings = std::move(warnings);
        return out;
    }
    last_attempts_ = attempts;
    throw BackendError(LlmErrc::backend_unavailable, "backend '" + config_.id + "' failed after " +
                                                         std::to_string(attempts) + " attempts: " + last_error);
}

}  // namespace solomon::llm
