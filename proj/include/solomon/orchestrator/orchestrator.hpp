// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "solomon/bench/task.hpp"
#include "solomon/eval/evaluator.hpp"
#include "solomon/llm/backend.hpp"
#include "solomon/sandbox/sandbox.hpp"

namespace solomon::orch {

class OrchestratorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Generator system prompt shared by every baseline and pool request.
const std::string& generator_system_prompt();

// Sections of a parsed assessor template: preamble, task, thought,
// thought_prose, image, closing.
struct PromptTemplate {
    std::map<std::string, std::string> sections;

    static PromptTemplate parse(const std::string& text);
    static const PromptTemplate& builtin();
    const std::string& section(const std::string& name) const;
};

// Replaces every {{key}} in `text`.
std::string fill(std::string text, const std::map<std::string, std::string>& values);

struct SteeringConfig {
    // Keys: generator_system_suffix, assessor_goal, assessor_focus.
    std::map<std::string, std::string> fragments;
    bool include_images = true;
    int max_thoughts = 20;
    std::size_t error_log_tail_bytes = 4096;
    // Whether the assessor sees the generators' full answer text.
    bool include_prose = false;
    std::optional<std::filesystem::path> assessor_template;

    void validate() const;
    std::string fragment(const std::string& stage) const;
};

SteeringConfig steering_from_json(const nlohmann::json& j);
SteeringConfig load_steering(const std::filesystem::path& file);
nlohmann::json to_json(const SteeringConfig& s);

struct Thought {
    std::string id;
    std::string task_id;
    std::string mode;  // "baseline" or "solomon"
    std::string backend_id;
    int run_index = 0;
    llm::ChatRequest request;
    llm::ChatResponse response;
    std::optional<std::string> code;
    std::optional<sandbox::ExecutionOutcome> outcome;
    std::optional<FlatLayout> layout;
    std::optional<std::vector<uint8_t>> render;
    std::optional<eval::Verdict> verdict;
    // Backend failure or pipeline downgrade reason.
    std::string error;
    std::vector<std::string> warnings;
    // Digest of the pool the assessor saw.
    std::string pool_digest;
};

// Compact record without payloads.
nlohmann::json thought_summary(const Thought& t);

struct ThoughtPool {
    std::string task_id;
    std::vector<Thought> thoughts;
    nlohmann::json provenance;
};

struct PipelineConfig {
    sandbox::ExecutionLimits limits;
    std::filesystem::path work_root;
    int sandbox_workers = 4;
    int render_pixels = 512;
    double generator_temperature = 1.0;
    double assessor_temperature = 0.2;
    int max_output_tokens = 4096;
};

class Orchestrator {
public:
    Orchestrator(std::map<std::string, std::shared_ptr<llm::Backend>> backends, PipelineConfig config);

    std::vector<Thought> run_baseline(const bench::TaskSpec& task, const std::string& backend_id, int k,
                                      const SteeringConfig& steering);
    // Thoughts already realized for (backend, run) in `reuse` are taken as-is.
    using ThoughtCache = std::map<std::pair<std::string, int>, Thought>;
    ThoughtPool generate_pool(const bench::TaskSpec& task, const std::vector<std::string>& backend_ids, int k,
                              const SteeringConfig& steering, const ThoughtCache* reuse = nullptr);
    llm::ChatRequest build_assessor_prompt(const bench::TaskSpec& task, const ThoughtPool& pool,
                                           const SteeringConfig& steering, const std::string& assessor_id) const;
    Thought run_solomon(const bench::TaskSpec& task, const ThoughtPool& pool, const std::string& assessor_id,
                        const SteeringConfig& steering);

    llm::ChatRequest generator_request(const bench::TaskSpec& task, const std::string& backend_id, int run,
                                       const SteeringConfig& steering) const;
    // Sends `req` and runs extract, sanitize, execute, parse, render, classify.
    Thought realize(const bench::TaskSpec& task, const llm::ChatRequest& req, const std::string& mode,
                    const std::string& backend_id, int run);
    // Same pipeline on a response already in hand.
    Thought evaluate_response(const bench::TaskSpec& task, Thought t);

    llm::Backend& backend(const std::string& id) const;
    const PipelineConfig& config() const { return config_; }

private:
    std::filesystem::path workdir_for(const Thought& t) const;

    std::map<std::string, std::shared_ptr<llm::Backend>> backends_;
    PipelineConfig config_;
    std::unique_ptr<sandbox::WorkerPool> workers_;
};

}  // namespace solomon::orch
