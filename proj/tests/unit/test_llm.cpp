// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "solomon/llm/backend.hpp"
#include "temp_dir.hpp"

using namespace solomon::llm;

namespace {

ChatRequest sample() {
    ChatRequest r;
    r.backend_id = "gpt-4o";
    r.system_prompt = "You are an expert.";
    r.messages.push_back({"user", "Draw a circle.", {}});
    r.temperature = 1.0;
    r.max_output_tokens = 512;
    r.request_tag = "Circle/baseline/0";
    return r;
}

// Chat-completions stub on a loopback port.
class StubServer {
public:
    explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
            ++hits;
            handler(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
    std::atomic<int> hits{0};

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

void reply(httplib::Response& res, const std::string& text) {
    const nlohmann::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}},
                                 {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}};
    res.set_content(body.dump(), "application/json");
}

BackendConfig stub_config(const StubServer& s) {
    BackendConfig c;
    c.id = "stub";
    c.url = s.url();
    c.model = "stub-model";
    c.backoff_initial_seconds = 0.01;
    c.requests_per_second = 1000;
    c.burst = 100;
    c.timeout_seconds = 5;
    return c;
}

}  // namespace

TEST_CASE("digest") {
    const ChatRequest a = sample();
    SUBCASE("identical requests") { CHECK(digest(a) == digest(sample())); }
    SUBCASE("one message byte differs") {
        ChatRequest b = a;
        b.messages[0].text[0] = 'd';
        CHECK(digest(a) != digest(b));
    }
    SUBCASE("request tag is excluded") {
        ChatRequest b = a;
        b.request_tag = "Circle/baseline/4";
        CHECK(digest(a) == digest(b));
    }
    SUBCASE("covered fields") {
        for (int field = 0; field < 5; ++field) {
            ChatRequest b = a;
            if (field == 0) b.backend_id = "claude";
            if (field == 1) b.system_prompt += " ";
            if (field == 2) b.temperature = 0.2;
            if (field == 3) b.max_output_tokens = 513;
            if (field == 4) b.messages[0].images.push_back({1, 2, 3});
            CHECK(digest(a) != digest(b));
        }
    }
    SUBCASE("frozen value") {
        // sha256 of the canonical JSON, computed independently with python hashlib.
        CHECK(digest(a) == "e0e34b366c059b4a305e3420cecf8beff1bccfc0273aa1f0a4e73091ed386edf");
    }
}

TEST_CASE("sha256 and base64 helpers") {
    CHECK(sha256_hex("abc", 3) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const std::vector<uint8_t> bytes = {0, 1, 2, 250, 251, 252, 253};
    for (std::size_t n = 0; n <= bytes.size(); ++n) {
        const std::vector<uint8_t> prefix(bytes.begin(), bytes.begin() + static_cast<long>(n));
        CHECK(base64_decode(base64_encode(prefix)) == prefix);
    }
    CHECK(base64_encode({'M', 'a', 'n'}) == "TWFu");
}

TEST_CASE("request validation") {
    ChatRequest r = sample();
    r.messages.clear();
    CHECK_THROWS_AS(r.validate(), BackendError);
    r = sample();
    r.temperature = -0.1;
    CHECK_THROWS_AS(r.validate(), BackendError);
}

TEST_CASE("replay store") {
    solomon::testing::TempDir dir;
    ReplayStore store(dir.path() / "replay");
    ChatResponse resp;
    resp.text = "```python\nprint(1)\n```";
    resp.backend_id = "gpt-4o";
    store.store(sample(), resp);
    CHECK(std::filesystem::exists(store.path_for(digest(sample()))));

    ReplayBackend backend("gpt-4o", store);
    SUBCASE("primed digest") { CHECK(backend.complete(sample()).text == resp.text); }
    SUBCASE("tag does not matter") {
        ChatRequest other = sample();
        other.request_tag = "x";
        CHECK(backend.complete(other).text == resp.text);
    }
    SUBCASE("miss") {
        ChatRequest other = sample();
        other.messages[0].text = "Draw a square.";
        try {
            backend.complete(other);
            FAIL("expected ReplayMiss");
        } catch (const BackendError& e) {
            CHECK(e.code() == LlmErrc::replay_miss);
        }
    }
}

TEST_CASE("image policy") {
    ChatRequest r = sample();
    r.messages[0].images.push_back({0x89, 'P', 'N', 'G'});
    std::vector<std::string> warnings;
    SUBCASE("drop") {
        const auto sent = apply_image_policy(r, false, ImagePolicy::drop, warnings);
        CHECK(sent.image_count() == 0);
        CHECK(sent.messages[0].text == r.messages[0].text);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].rfind("ImageUnsupported", 0) == 0);
    }
    SUBCASE("error") {
        CHECK_THROWS_AS(apply_image_policy(r, false, ImagePolicy::error, warnings), BackendError);
    }
    SUBCASE("image-capable backend keeps attachments") {
        CHECK(apply_image_policy(r, true, ImagePolicy::error, warnings).image_count() == 1);
    }
    SUBCASE("text-only mock sees no images") {
        ScriptedMockBackend mock("llama", false);
        mock.set_default("ok");
        const auto resp = mock.complete(r);
        CHECK(mock.received().at(0).image_count() == 0);
        CHECK(resp.warnings.size() == 1);
    }
}

TEST_CASE("scripted mock") {
    ScriptedMockBackend mock("m");
    mock.set("Circle/baseline/0", "first");
    CHECK(mock.complete(sample()).text == "first");
    ChatRequest other = sample();
    other.request_tag = "Circle/baseline/1";
    CHECK_THROWS_AS(mock.complete(other), BackendError);
    mock.set_default("fallback");
    CHECK(mock.complete(other).text == "fallback");
}

TEST_CASE("recording then replaying yields no miss") {
    solomon::testing::TempDir dir;
    ReplayStore store(dir.path() / "rec");
    auto mock = std::make_shared<ScriptedMockBackend>("llama", false);
    mock->set_default("answer");
    RecordingBackend rec(mock, store, false, ImagePolicy::drop);
    ChatRequest r = sample();
    r.backend_id = "llama";
    r.messages[0].images.push_back({1, 2});
    const auto live = rec.complete(r);
    CHECK(store.size() == 1);
    ReplayBackend replay("llama", store, false, ImagePolicy::drop);
    const auto again = replay.complete(r);
    CHECK(again.text == live.text);
    CHECK(again.warnings == live.warnings);
    CHECK(again.content_digest == live.content_digest);
}

TEST_CASE("http backend") {
    SUBCASE("request shape and auth") {
        nlohmann::json seen;
        std::string auth;
        StubServer server([&](const httplib::Request& req, httplib::Response& res) {
            seen = nlohmann::json::parse(req.body);
            auth = req.get_header_value("Authorization");
            reply(res, "hello");
        });
        setenv("SOLOMON_TEST_KEY", "sekret", 1);
        BackendConfig c = stub_config(server);
        c.auth_env = "SOLOMON_TEST_KEY";
        HttpChatBackend backend(c);
        ChatRequest r = sample();
        r.messages[0].images.push_back({1, 2, 3});
        const auto resp = backend.complete(r);
        CHECK(resp.text == "hello");
        CHECK(resp.usage.prompt == 11);
        CHECK(resp.usage.completion == 7);
        CHECK(resp.content_digest == digest(r));
        CHECK(auth == "Bearer sekret");
        CHECK(seen["model"] == "stub-model");
        CHECK(seen["max_tokens"] == 512);
        CHECK(seen["messages"][0]["role"] == "system");
        CHECK(seen["messages"][1]["content"][1]["image_url"]["url"] == "data:image/png;base64,AQID");
    }
    SUBCASE("retries on 5xx then succeeds") {
        std::atomic<int> n{0};
        StubServer server([&](const httplib::Request&, httplib::Response& res) {
            if (n++ < 2) res.status = 503;
            else reply(res, "third time");
        });
        std::vector<double> sleeps;
        HttpChatBackend backend(stub_config(server), [&](double s) { sleeps.push_back(s); });
        CHECK(backend.complete(sample()).text == "third time");
        CHECK(backend.attempts_made() == 3);
        CHECK(sleeps == std::vector<double>{0.01, 0.02});
    }
    SUBCASE("429 exhausts the retry budget") {
        StubServer server([&](const httplib::Request&, httplib::Response& res) { res.status = 429; });
        HttpChatBackend backend(stub_config(server), [](double) {});
        CHECK_THROWS_AS(backend.complete(sample()), BackendError);
        CHECK(server.hits == 4);
    }
    SUBCASE("client errors are not retried") {
        StubServer server([&](const httplib::Request&, httplib::Response& res) { res.status = 400; });
        HttpChatBackend backend(stub_config(server), [](double) {});
        CHECK_THROWS_AS(backend.complete(sample()), BackendError);
        CHECK(server.hits == 1);
    }
    SUBCASE("transport errors are retried") {
        BackendConfig c;
        c.id = "down";
        c.url = "http://127.0.0.1:1/v1/chat/completions";
        c.max_retries = 2;
        c.timeout_seconds = 1;
        c.requests_per_second = 1000;
        HttpChatBackend backend(c, [](double) {});
        try {
            backend.complete(sample());
            FAIL("expected BackendUnavailable");
        } catch (const BackendError& e) {
            CHECK(e.code() == LlmErrc::backend_unavailable);
        }
        CHECK(backend.attempts_made() == 3);
    }
    SUBCASE("missing credential names the variable") {
        unsetenv("SOLOMON_ABSENT_KEY");
        BackendConfig c;
        c.id = "x";
        c.url = "https://example.invalid/v1/chat/completions";
        c.auth_env = "SOLOMON_ABSENT_KEY";
        try {
            HttpChatBackend backend(c);
            FAIL("expected ConfigError");
        } catch (const BackendError& e) {
            CHECK(e.code() == LlmErrc::config_error);
            CHECK(std::string(e.what()).find("SOLOMON_ABSENT_KEY") != std::string::npos);
        }
    }
    SUBCASE("in-flight limit") {
        std::atomic<int> active{0}, peak{0};
        StubServer server([&](const httplib::Request&, httplib::Response& res) {
            const int now = ++active;
            int p = peak;
            while (now > p && !peak.compare_exchange_weak(p, now)) {
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(30));
            --active;
            reply(res, "ok");
        });
        BackendConfig c = stub_config(server);
        c.in_flight_limit = 2;
        HttpChatBackend backend(c);
        std::vector<std::thread> threads;
        for (int i = 0; i < 6; ++i) threads.emplace_back([&] { backend.complete(sample()); });
        for (auto& t : threads) t.join();
        CHECK(peak <= 2);
        CHECK(server.hits == 6);
    }
}

TEST_CASE("backend config parsing") {
    const auto c = backend_config_from_json({{"id", "llama-70b"}, {"url", "https://x/v1/chat/completions"},
                                             {"supports_images", false}, {"image_policy", "error"}});
    CHECK(c.model == "llama-70b");
    CHECK_FALSE(c.supports_images);
    CHECK(c.image_policy == ImagePolicy::error);
    CHECK_THROWS_AS(backend_config_from_json({{"url", "x"}}), BackendError);
    CHECK_THROWS_AS(backend_config_from_json({{"id", "a"}, {"image_policy", "maybe"}}), BackendError);
}

TEST_CASE("repeated runs keep separate samples") {
    CHECK(sample_index("Circle/baseline/gpt-4o/3") == 3);
    CHECK(sample_index("Circle/baseline/gpt-4o/12") == 12);
    CHECK(sample_index("Circle/baseline/gpt-4o") == 0);
    CHECK(sample_index("run7") == 0);
    CHECK(sample_index("") == 0);

    solomon::testing::TempDir dir;
    ReplayStore store(dir.path() / "samples");
    for (int run : {2, 0, 1}) {
        ChatRequest r = sample();
        r.request_tag = "Circle/baseline/gpt-4o/" + std::to_string(run);
        ChatResponse resp;
        resp.text = "answer " + std::to_string(run);
        store.store(r, resp);
    }
    CHECK(store.size() == 1);
    CHECK(store.sample_count() == 3);
    ReplayBackend backend("gpt-4o", store);
    for (int run = 0; run < 3; ++run) {
        ChatRequest r = sample();
        r.request_tag = "Circle/baseline/gpt-4o/" + std::to_string(run);
        CHECK(backend.complete(r).text == "answer " + std::to_string(run));
    }
    ChatRequest r = sample();
    r.request_tag = "Circle/baseline/gpt-4o/3";
    CHECK_THROWS_AS(backend.complete(r), BackendError);
}

TEST_CASE("recording serves stored samples before calling the inner backend") {
    solomon::testing::TempDir dir;
    ReplayStore store(dir.path() / "rec");
    auto mock = std::make_shared<ScriptedMockBackend>("m");
    mock->set_default("first");
    RecordingBackend rec(mock, store, true, ImagePolicy::drop);
    ChatRequest r = sample();
    r.backend_id = "m";
    CHECK(rec.complete(r).text == "first");
    mock->set_default("second");
    CHECK(rec.complete(r).text == "first");
    CHECK(mock->received().size() == 1);
    r.request_tag = "Circle/baseline/m/1";
    CHECK(rec.complete(r).text == "second");
    CHECK(store.sample_count() == 2);
}
