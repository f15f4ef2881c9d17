// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "solomon/llm/backend.hpp"

namespace solomon::llm {

namespace fs = std::filesystem;

namespace {

const char* errc_name(LlmErrc code) {
    switch (code) {
        case LlmErrc::backend_unavailable: return "BackendUnavailable";
        case LlmErrc::replay_miss: return "ReplayMiss";
        case LlmErrc::image_unsupported: return "ImageUnsupported";
        case LlmErrc::config_error: return "ConfigError";
        case LlmErrc::invalid_request: return "InvalidRequest";
    }
    return "BackendError";
}

}  // namespace

BackendError::BackendError(LlmErrc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void ChatRequest::validate() const {
    if (messages.empty()) throw BackendError(LlmErrc::invalid_request, "request has no messages");
    if (!(temperature >= 0)) throw BackendError(LlmErrc::invalid_request, "temperature must be nonnegative");
    if (max_output_tokens < 1) throw BackendError(LlmErrc::invalid_request, "max_output_tokens must be positive");
}

std::size_t ChatRequest::image_count() const {
    std::size_t n = 0;
    for (const auto& m : messages) n += m.images.size();
    return n;
}

std::string sha256_hex(const void* data, std::size_t size) {
    unsigned char md[SHA256_DIGEST_LENGTH];
    SHA256(static_cast<const unsigned char*>(data), size, md);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * SHA256_DIGEST_LENGTH);
    for (unsigned char b : md) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 15]);
    }
    return out;
}

std::string base64_encode(const std::vector<uint8_t>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
    std::string clean;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
    if (clean.size() % 4 != 0) throw std::invalid_argument("base64 input length is not a multiple of 4");
    std::vector<uint8_t> out(3 * clean.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                  static_cast<int>(clean.size()));
    if (n < 0) throw std::invalid_argument("invalid base64 input");
    std::size_t pad = 0;
    if (!clean.empty() && clean.back() == '=') ++pad;
    if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

nlohmann::json normalized_request(const ChatRequest& req) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : req.messages) {
        nlohmann::json images = nlohmann::json::array();
        for (const auto& img : m.images) images.push_back(sha256_hex(img.data(), img.size()));
        messages.push_back({{"role", m.role}, {"text", m.text}, {"images", images}});
    }
    return {
        {"backend", req.backend_id},
        {"system", req.system_prompt},
        {"messages", messages},
        {"temperature", req.temperature},
        {"max_output_tokens", req.max_output_tokens},
    };
}

std::string digest(const ChatRequest& req) {
    const std::string canonical = normalized_request(req).dump();
    return sha256_hex(canonical.data(), canonical.size());
}

nlohmann::json response_to_json(const ChatResponse& r) {
    return {
        {"text", r.text},
        {"usage", {{"prompt", r.usage.prompt}, {"completion", r.usage.completion}}},
        {"latency_seconds", r.latency_seconds},
        {"backend_id", r.backend_id},
        {"content_digest", r.content_digest},
        {"error", r.error},
        {"error_message", r.error_message},
        {"warnings", r.warnings},
    };
}

ChatResponse response_from_json(const nlohmann::json& j) {
    ChatResponse r;
    r.text = j.at("text").get<std::string>();
    if (j.contains("usage")) {
        r.usage.prompt = j["usage"].value("prompt", 0);
        r.usage.completion = j["usage"].value("completion", 0);
    }
    r.latency_seconds = j.value("latency_seconds", 0.0);
    r.backend_id = j.value("backend_id", std::string{});
    r.content_digest = j.value("content_digest", std::string{});
    r.error = j.value("error", false);
    r.error_message = j.value("error_message", std::string{});
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
}

ChatRequest apply_image_policy(const ChatRequest& req, bool supports_images, ImagePolicy policy,
                               std::vector<std::string>& warnings) {
    const std::size_t n = req.image_count();
    if (supports_images || n == 0) return req;
    if (policy == ImagePolicy::error)
        throw BackendError(LlmErrc::image_unsupported,
                           "backend '" + req.backend_id + "' is text-only but the request carries " +
                               std::to_string(n) + " image(s)");
    ChatRequest stripped = req;
    for (auto& m : stripped.messages) m.images.clear();
    warnings.push_back("ImageUnsupported: dropped " + std::to_string(n) + " image(s) for text-only backend '" +
                       req.backend_id + "'");
    return stripped;
}

BackendConfig backend_config_from_json(const nlohmann::json& j) {
    BackendConfig c;
    try {
        c.id = j.at("id").get<std::string>();
        c.url = j.value("url", std::string{});
        c.model = j.value("model", c.id);
        c.auth_env = j.value("auth_env", std::string{});
        c.auth_header = j.value("auth_header", c.auth_header);
        c.auth_prefix = j.value("auth_prefix", c.auth_prefix);
        c.supports_images = j.value("supports_images", c.supports_images);
        const std::string policy = j.value("image_policy", std::string("drop"));
        if (policy == "drop") c.image_policy = ImagePolicy::drop;
        else if (policy == "error") c.image_policy = ImagePolicy::error;
        else throw BackendError(LlmErrc::config_error, "image_policy must be 'drop' or 'error'");
        c.max_retries = j.value("max_retries", c.max_retries);
        c.backoff_initial_seconds = j.value("backoff_initial_seconds", c.backoff_initial_seconds);
        c.in_flight_limit = j.value("in_flight_limit", c.in_flight_limit);
        c.requests_per_second = j.value("requests_per_second", c.requests_per_second);
        c.burst = j.value("burst", c.burst);
        c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(LlmErrc::config_error, std::string("backend entry: ") + e.what());
    }
    if (c.id.empty()) throw BackendError(LlmErrc::config_error, "backend id must be nonempty");
    if (c.max_retries < 0 || c.in_flight_limit < 1 || c.burst < 1 || !(c.requests_per_second > 0))
        throw BackendError(LlmErrc::config_error, "backend '" + c.id + "' has invalid limits");
    return c;
}

std::vector<BackendConfig> load_backend_configs(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw BackendError(LlmErrc::config_error, "cannot read backends file " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(LlmErrc::config_error, file.string() + ": " + e.what());
    }
    const auto& list = j.contains("backends") ? j["backends"] : j;
    if (!list.is_array()) throw BackendError(LlmErrc::config_error, file.string() + ": expected a list of backends");
    std::vector<BackendConfig> out;
    for (const auto& entry : list) out.push_back(backend_config_from_json(entry));
    return out;
}

ReplayStore::ReplayStore(fs::path dir) : dir_(std::move(dir)) {}

fs::path ReplayStore::path_for(const std::string& d) const { return dir_ / (d + ".json"); }

std::optional<nlohmann::json> ReplayStore::read(const std::string& d) const {
    std::ifstream in(path_for(d));
    if (!in) return std::nullopt;
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(LlmErrc::replay_miss, "replay file " + path_for(d).string() + " is corrupt: " + e.what());
    }
}

std::optional<ChatResponse> ReplayStore::lookup(const ChatRequest& req) const {
    const std::size_t index = sample_index(req.request_tag);
    std::lock_guard lock(mutex_);
    const auto j = read(digest(req));
    if (!j) return std::nullopt;
    const auto& samples = j->at("samples");
    if (index >= samples.size() || samples[index].is_null()) return std::nullopt;
    return response_from_json(samples[index]);
}

void ReplayStore::store(const ChatRequest& req, const ChatResponse& resp) const {
    const std::string d = digest(req);
    const std::size_t index = sample_index(req.request_tag);
    std::lock_guard lock(mutex_);
    fs::create_directories(dir_);
    nlohmann::json j = read(d).value_or(nlohmann::json{
        {"digest", d}, {"request", normalized_request(req)}, {"samples", nlohmann::json::array()}});
    auto& samples = j["samples"];
    while (samples.size() <= index) samples.push_back(nullptr);
    samples[index] = response_to_json(resp);
    const auto tmp = path_for(d).string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, path_for(d));
}

std::size_t ReplayStore::size() const {
    std::size_t n = 0;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir_, ec))
        if (e.path().extension() == ".json") ++n;
    return n;
}

std::size_t ReplayStore::sample_count() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir_, ec)) {
        if (e.path().extension() != ".json") continue;
        const auto j = read(e.path().stem().string());
        if (j)
            for (const auto& s : j->at("samples")) n += s.is_null() ? 0 : 1;
    }
    return n;
}

std::size_t sample_index(const std::string& request_tag) {
    std::size_t i = request_tag.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(request_tag[i - 1]))) --i;
    if (i == request_tag.size() || (i > 0 && request_tag[i - 1] != '/')) return 0;
    return std::stoul(request_tag.substr(i));
}

TokenBucket::TokenBucket(double rate_per_second, int burst)
    : rate_(rate_per_second), capacity_(burst), tokens_(burst), last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
    std::unique_lock lock(mutex_);
    for (;;) {
        const auto now = std::chrono::steady_clock::now();
        tokens_ = std::min(capacity_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
        last_ = now;
        if (tokens_ >= 1) {
            tokens_ -= 1;
            return;
        }
        const double wait = (1 - tokens_) / rate_;
        lock.unlock();
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
        lock.lock();
    }
}

InFlightGate::InFlightGate(int limit) : available_(limit) {}

void InFlightGate::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return available_ > 0; });
    --available_;
}

void InFlightGate::release() {
    {
        std::lock_guard lock(mutex_);
        ++available_;
    }
    cv_.notify_one();
}

ReplayBackend::ReplayBackend(std::string id, const ReplayStore& store, bool supports_images, ImagePolicy policy)
    : id_(std::move(id)), store_(store), supports_images_(supports_images), policy_(policy) {}

ChatResponse ReplayBackend::complete(const ChatRequest& req) {
    req.validate();
    std::vector<std::string> warnings;
    const ChatRequest sent = apply_image_policy(req, supports_images_, policy_, warnings);
    auto hit = store_.lookup(sent);
    if (!hit)
        throw BackendError(LlmErrc::replay_miss, "no stored response for digest " + digest(sent) + " sample " +
                                                     std::to_string(sample_index(req.request_tag)) + " (tag " +
                                                     req.request_tag + ") in " + store_.dir().string());
    hit->warnings.insert(hit->warnings.end(), warnings.begin(), warnings.end());
    return *hit;
}

ScriptedMockBackend::ScriptedMockBackend(std::string id, bool supports_images, ImagePolicy policy)
    : id_(std::move(id)), supports_images_(supports_images), policy_(policy) {}

void ScriptedMockBackend::set(const std::string& tag, std::string text) {
    std::lock_guard lock(mutex_);
    scripted_[tag] = std::move(text);
}

void ScriptedMockBackend::set_default(std::string text) {
    std::lock_guard lock(mutex_);
    fallback_ = std::move(text);
}

void ScriptedMockBackend::set_handler(std::function<std::optional<std::string>(const ChatRequest&)> handler) {
    std::lock_guard lock(mutex_);
    handler_ = std::move(handler);
}

ChatResponse ScriptedMockBackend::complete(const ChatRequest& req) {
    req.validate();
    std::vector<std::string> warnings;
    const ChatRequest sent = apply_image_policy(req, supports_images_, policy_, warnings);
    std::optional<std::string> text;
    std::function<std::optional<std::string>(const ChatRequest&)> handler;
    {
        std::lock_guard lock(mutex_);
        received_.push_back(sent);
        if (const auto it = scripted_.find(req.request_tag); it != scripted_.end()) text = it->second;
        handler = handler_;
    }
    if (!text && handler) text = handler(sent);
    if (!text) {
        std::lock_guard lock(mutex_);
        text = fallback_;
    }
    if (!text) throw BackendError(LlmErrc::backend_unavailable, "no scripted response for tag '" + req.request_tag + "'");
    ChatResponse r;
    r.text = *text;
    r.backend_id = id_;
    r.content_digest = digest(sent);
    r.usage.prompt = static_cast<int>(normalized_request(sent).dump().size() / 4);
    r.usage.completion = static_cast<int>(r.text.size() / 4);
    r.warnings = std::move(warnings);
    return r;
}

std::vector<ChatRequest> ScriptedMockBackend::received() const {
    std::lock_guard lock(mutex_);
    return received_;
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, const ReplayStore& store, bool supports_images,
                                   ImagePolicy policy)
    : inner_(std::move(inner)), store_(store), supports_images_(supports_images), policy_(policy) {}

ChatResponse RecordingBackend::complete(const ChatRequest& req) {
    req.validate();
    std::vector<std::string> warnings;
    const ChatRequest sent = apply_image_policy(req, supports_images_, policy_, warnings);
    if (auto hit = store_.lookup(sent)) {
        hit->warnings.insert(hit->warnings.begin(), warnings.begin(), warnings.end());
        return *hit;
    }
    ChatResponse r = inner_->complete(sent);
    r.content_digest = digest(sent);
    if (!r.error) store_.store(sent, r);
    r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
    return r;
}

}  // namespace solomon::llm
