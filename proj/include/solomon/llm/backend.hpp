// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace solomon::llm {

enum class LlmErrc { backend_unavailable, replay_miss, image_unsupported, config_error, invalid_request };

class BackendError : public std::runtime_error {
public:
    BackendError(LlmErrc code, const std::string& what);
    LlmErrc code() const { return code_; }

private:
    LlmErrc code_;
};

struct Message {
    std::string role;  // "user" or "assistant"
    std::string text;
    std::vector<std::vector<uint8_t>> images;  // PNG payloads
};

struct ChatRequest {
    std::string backend_id;
    std::string system_prompt;
    std::vector<Message> messages;
    double temperature = 1.0;
    int max_output_tokens = 4096;
    // task id + stage + run index; not part of the digest
    std::string request_tag;

    void validate() const;
    std::size_t image_count() const;
};

struct TokenUsage {
    int prompt = 0;
    int completion = 0;
};

struct ChatResponse {
    std::string text;
    TokenUsage usage;
    double latency_seconds = 0;
    std::string backend_id;
    std::string content_digest;
    bool error = false;
    std::string error_message;
    std::vector<std::string> warnings;
};

std::string sha256_hex(const void* data, std::size_t size);
std::string base64_encode(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> base64_decode(const std::string& text);

// Canonical JSON of everything the digest covers; images appear as SHA-256 hex.
nlohmann::json normalized_request(const ChatRequest& req);
std::string digest(const ChatRequest& req);

nlohmann::json response_to_json(const ChatResponse& r);
ChatResponse response_from_json(const nlohmann::json& j);

enum class ImagePolicy { drop, error };

// Strips attachments for text-only backends (drop) or refuses them (error).
ChatRequest apply_image_policy(const ChatRequest& req, bool supports_images, ImagePolicy policy,
                               std::vector<std::string>& warnings);

class Backend {
public:
    virtual ~Backend() = default;
    virtual ChatResponse complete(const ChatRequest& req) = 0;
    virtual std::string id() const = 0;
    virtual bool supports_images() const = 0;
};

// One entry of the backends file.
struct BackendConfig {
    std::string id;
    std::string url;  // full chat-completions endpoint
    std::string model;
    std::string auth_env;  // environment variable holding the credential
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    bool supports_images = true;
    ImagePolicy image_policy = ImagePolicy::drop;
    int max_retries = 3;
    double backoff_initial_seconds = 1.0;
    int in_flight_limit = 4;
    double requests_per_second = 1.0;
    int burst = 4;
    double timeout_seconds = 300;
};

BackendConfig backend_config_from_json(const nlohmann::json& j);
std::vector<BackendConfig> load_backend_configs(const std::filesystem::path& file);

// Trailing run index of a request tag ("Circle/baseline/gpt-4o/3" -> 3); 0 when absent.
std::size_t sample_index(const std::string& request_tag);

// Replay store: <dir>/<digest>.json holding {"digest", "request", "samples"}.
// Identical requests repeated across runs share a digest; samples[i] is the
// response recorded for run index i of the request tag.
class ReplayStore {
public:
    explicit ReplayStore(std::filesystem::path dir);
    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path path_for(const std::string& digest) const;
    std::optional<ChatResponse> lookup(const ChatRequest& req) const;
    void store(const ChatRequest& req, const ChatResponse& resp) const;
    // Number of digest files.
    std::size_t size() const;
    std::size_t sample_count() const;

private:
    std::optional<nlohmann::json> read(const std::string& digest) const;

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
};

// Blocking token bucket.
class TokenBucket {
public:
    TokenBucket(double rate_per_second, int burst);
    void acquire();

private:
    double rate_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mutex_;
};

// Counting gate for in-flight requests.
class InFlightGate {
public:
    explicit InFlightGate(int limit);
    void acquire();
    void release();

private:
    int available_;
    std::mutex mutex_;
    std::condition_variable cv_;
};

class HttpChatBackend : public Backend {
public:
    using Sleeper = std::function<void(double seconds)>;
    explicit HttpChatBackend(BackendConfig config, Sleeper sleeper = {});
    ChatResponse complete(const ChatRequest& req) override;
    std::string id() const override { return config_.id; }
    bool supports_images() const override { return config_.supports_images; }

    // Request body in the chat-completions dialect.
    nlohmann::json wire_body(const ChatRequest& req) const;
    int attempts_made() const { return last_attempts_; }

private:
    BackendConfig config_;
    std::string credential_;
    Sleeper sleeper_;
    TokenBucket bucket_;
    InFlightGate gate_;
    std::atomic<int> last_attempts_{0};
};

class ReplayBackend : public Backend {
public:
    ReplayBackend(std::string id, const ReplayStore& store, bool supports_images = true,
                  ImagePolicy policy = ImagePolicy::drop);
    ChatResponse complete(const ChatRequest& req) override;
    std::string id() const override { return id_; }
    bool supports_images() const override { return supports_images_; }

private:
    std::string id_;
    const ReplayStore& store_;
    bool supports_images_;
    ImagePolicy policy_;
};

// Canned responses keyed by request_tag; falls back to the default text when set.
class ScriptedMockBackend : public Backend {
public:
    explicit ScriptedMockBackend(std::string id, bool supports_images = true, ImagePolicy policy = ImagePolicy::drop);
    void set(const std::string& tag, std::string text);
    void set_default(std::string text);
    // Responses computed from the request.
    void set_handler(std::function<std::optional<std::string>(const ChatRequest&)> handler);
    ChatResponse complete(const ChatRequest& req) override;
    std::string id() const override { return id_; }
    bool supports_images() const override { return supports_images_; }
    std::vector<ChatRequest> received() const;

private:
    std::string id_;
    bool supports_images_;
    ImagePolicy policy_;
    std::map<std::string, std::string> scripted_;
    std::optional<std::string> fallback_;
    std::function<std::optional<std::string>(const ChatRequest&)> handler_;
    mutable std::mutex mutex_;
    std::vector<ChatRequest> received_;
};

// Serves stored samples; otherwise calls `inner` and persists every successful response.
class RecordingBackend : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, const ReplayStore& store, bool supports_images,
                     ImagePolicy policy);
    ChatResponse complete(const ChatRequest& req) override;
    std::string id() const override { return inner_->id(); }
    bool supports_images() const override { return inner_->supports_images(); }

private:
    std::shared_ptr<Backend> inner_;
    const ReplayStore& store_;
    bool supports_images_;
    ImagePolicy policy_;
};

}  // namespace solomon::llm
