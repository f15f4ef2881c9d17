// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include "solomon/orchestrator/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <tuple>

#include "solomon/geometry/geometry.hpp"
#include "solomon_prompts.hpp"

namespace solomon::orch {

namespace fs = std::filesystem;

namespace {

std::string trim_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && s[start] == '\n') ++start;
    return s.substr(start);
}

std::string path_component(const std::string& name) {
    std::string out;
    for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
    return out.empty() ? "_" : out;
}

eval::Verdict runtime_verdict(const bench::TaskSpec& task, const std::string& reason) {
    eval::Verdict v;
    v.category = eval::Category::runtime_error;
    v.confidence = 1;
    v.evidence.push_back(reason);
    if (!task.target.ground_truths.empty())
        for (const auto& key : task.target.ground_truths.front().layer_keys()) v.per_layer_scores[to_string(key)] = 0;
    return v;
}

const std::set<std::string> kStages = {"generator_system_suffix", "assessor_goal", "assessor_focus"};

}  // namespace

const std::string& generator_system_prompt() {
    static const std::string prompt = trim_newlines(embedded::generator_system);
    return prompt;
}

PromptTemplate PromptTemplate::parse(const std::string& text) {
    PromptTemplate t;
    std::istringstream in(text);
    std::string line, current, body;
    auto flush = [&] {
        if (!current.empty()) t.sections[current] = trim_newlines(body);
        body.clear();
    };
    while (std::getline(in, line)) {
        if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
            flush();
            current = line.substr(1, line.size() - 2);
            continue;
        }
        if (current.empty()) continue;
        body += line + "\n";
    }
    flush();
    for (const char* required : {"preamble", "task", "thought", "image", "closing"})
        if (!t.sections.count(required))
            throw OrchestratorError(std::string("assessor template lacks section [") + required + "]");
    return t;
}

const PromptTemplate& PromptTemplate::builtin() {
    static const PromptTemplate t = parse(embedded::assessor_template);
    return t;
}

const std::string& PromptTemplate::section(const std::string& name) const {
    static const std::string empty;
    const auto it = sections.find(name);
    return it == sections.end() ? empty : it->second;
}

std::string fill(std::string text, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const auto open = text.find("{{", pos);
        if (open == std::string::npos) break;
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos) break;
        const auto it = values.find(text.substr(open + 2, close - open - 2));
        out += text.substr(pos, open - pos);
        if (it != values.end()) out += it->second;
        else out += text.substr(open, close + 2 - open);
        pos = close + 2;
    }
    return out + text.substr(pos);
}

void SteeringConfig::validate() const {
    if (max_thoughts < 1) throw OrchestratorError("steering max_thoughts must be at least 1");
    for (const auto& [stage, text] : fragments)
        if (!kStages.count(stage)) throw OrchestratorError("unknown steering stage '" + stage + "'");
}

std::string SteeringConfig::fragment(const std::string& stage) const {
    const auto it = fragments.find(stage);
    return it == fragments.end() ? std::string{} : trim_newlines(it->second);
}

SteeringConfig steering_from_json(const nlohmann::json& j) {
    SteeringConfig s;
    for (const auto& [key, value] : j.items()) {
        if (kStages.count(key)) s.fragments[key] = value.get<std::string>();
        else if (key == "include_images") s.include_images = value.get<bool>();
        else if (key == "max_thoughts") s.max_thoughts = value.get<int>();
        else if (key == "error_log_tail_bytes") s.error_log_tail_bytes = value.get<std::size_t>();
        else if (key == "include_prose") s.include_prose = value.get<bool>();
        else if (key == "assessor_template") s.assessor_template = value.get<std::string>();
        else throw OrchestratorError("unknown steering key '" + key + "'");
    }
    s.validate();
    return s;
}

SteeringConfig load_steering(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw OrchestratorError("cannot read steering file " + file.string());
    SteeringConfig s;
    try {
        s = steering_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw OrchestratorError("steering file " + file.string() + ": " + e.what());
    }
    if (s.assessor_template && s.assessor_template->is_relative())
        s.assessor_template = file.parent_path() / *s.assessor_template;
    return s;
}

nlohmann::json to_json(const SteeringConfig& s) {
    nlohmann::json j = {
        {"include_images", s.include_images},
        {"max_thoughts", s.max_thoughts},
        {"error_log_tail_bytes", s.error_log_tail_bytes},
        {"include_prose", s.include_prose},
    };
    for (const auto& [stage, text] : s.fragments) j[stage] = text;
    if (s.assessor_template) j["assessor_template"] = s.assessor_template->generic_string();
    return j;
}

nlohmann::json thought_summary(const Thought& t) {
    nlohmann::json j = {
        {"id", t.id},
        {"task", t.task_id},
        {"mode", t.mode},
        {"backend", t.backend_id},
        {"run", t.run_index},
        {"request_digest", llm::digest(t.request)},
        {"response",
         {{"content_digest", t.response.content_digest},
          {"prompt_tokens", t.response.usage.prompt},
          {"completion_tokens", t.response.usage.completion},
          {"error", t.response.error},
          {"warnings", t.response.warnings}}},
        {"has_code", t.code.has_value()},
        {"error", t.error},
        {"warnings", t.warnings},
    };
    if (t.code) j["code_sha256"] = llm::sha256_hex(t.code->data(), t.code->size());
    if (t.outcome) {
        j["execution"] = {
            {"status", sandbox::to_string(t.outcome->status)},
            {"exit_code", t.outcome->exit_code ? nlohmann::json(*t.outcome->exit_code) : nlohmann::json()},
            {"stderr_tail", sandbox::tail_bytes(t.outcome->stderr_text, 2048)},
            {"sanitizer_hits", t.outcome->sanitizer_hits},
            {"artifact", t.outcome->primary_artifact() ? t.outcome->primary_artifact()->name : std::string{}},
            {"warnings", t.outcome->warnings},
        };
    }
    if (t.verdict) j["verdict"] = *t.verdict;
    if (!t.pool_digest.empty()) j["pool_digest"] = t.pool_digest;
    return j;
}

Orchestrator::Orchestrator(std::map<std::string, std::shared_ptr<llm::Backend>> backends, PipelineConfig config)
    : backends_(std::move(backends)),
      config_(std::move(config)),
      workers_(std::make_unique<sandbox::WorkerPool>(std::max(1, config_.sandbox_workers))) {
    if (config_.work_root.empty()) throw OrchestratorError("pipeline work_root is not set");
}

llm::Backend& Orchestrator::backend(const std::string& id) const {
    const auto it = backends_.find(id);
    if (it == backends_.end() || !it->second) throw OrchestratorError("backend '" + id + "' is not configured");
    return *it->second;
}

fs::path Orchestrator::workdir_for(const Thought& t) const {
    return config_.work_root / path_component(t.task_id) / path_component(t.mode) / path_component(t.backend_id) /
           std::to_string(t.run_index);
}

llm::ChatRequest Orchestrator::generator_request(const bench::TaskSpec& task, const std::string& backend_id, int run,
                                                 const SteeringConfig& steering) const {
    llm::ChatRequest req;
    req.backend_id = backend_id;
    req.system_prompt = generator_system_prompt();
    const std::string suffix = steering.fragment("generator_system_suffix");
    if (!suffix.empty()) req.system_prompt += "\n\n" + suffix;
    req.messages.push_back({"user", task.prompt, {}});
    req.temperature = config_.generator_temperature;
    req.max_output_tokens = config_.max_output_tokens;
    req.request_tag = task.id + "/baseline/" + backend_id + "/" + std::to_string(run);
    return req;
}

Thought Orchestrator::realize(const bench::TaskSpec& task, const llm::ChatRequest& req, const std::string& mode,
                              const std::string& backend_id, int run) {
    Thought t;
    t.task_id = task.id;
    t.mode = mode;
    t.backend_id = backend_id;
    t.run_index = run;
    t.id = task.id + "/" + mode + "/" + backend_id + "/" + std::to_string(run);
    t.request = req;
    try {
        t.response = backend(backend_id).complete(req);
    } catch (const std::exception& e) {
        t.error = e.what();
        t.response.backend_id = backend_id;
        t.response.error = true;
        t.response.error_message = e.what();
        t.verdict = runtime_verdict(task, std::string("backend error: ") + e.what());
        return t;
    }
    return evaluate_response(task, std::move(t));
}

Thought Orchestrator::evaluate_response(const bench::TaskSpec& task, Thought t) {
    for (const auto& w : t.response.warnings) t.warnings.push_back(w);
    std::string source;
    try {
        auto extracted = sandbox::extract_code(t.response.text);
        for (auto& w : extracted.warnings) t.warnings.push_back(std::move(w));
        source = std::move(extracted.source);
    } catch (const sandbox::NoCodeBlock& e) {
        t.error = e.what();
        t.verdict = runtime_verdict(task, "no code block in response");
        return t;
    }
    auto clean = sandbox::sanitize(source);
    t.code = clean.source;

    const fs::path wd = workdir_for(t);
    std::error_code ec;
    fs::remove_all(wd, ec);
    fs::create_directories(wd, ec);
    auto outcome = workers_->execute(*t.code, config_.limits, wd);
    outcome.sanitizer_hits = std::move(clean.removed_lines);

    const FlatLayout* layout = nullptr;
    std::string parse_error;
    if (outcome.status == sandbox::ExecStatus::ok) {
        auto parsed = eval::parse_artifact(outcome);
        if (parsed.layout) {
            t.layout = std::move(parsed.layout);
            layout = &*t.layout;
            if (t.layout->has_polygons()) {
                try {
                    t.render = geom::render_layout_png(*t.layout, config_.render_pixels);
                } catch (const std::exception& e) {
                    t.warnings.push_back(std::string("render failed: ") + e.what());
                }
            }
        } else {
            parse_error = parsed.error;
        }
    }
    t.outcome = std::move(outcome);
    try {
        t.verdict = eval::classify(*t.outcome, layout, task.target, task.eval_options);
    } catch (const std::exception& e) {
        t.verdict = runtime_verdict(task, std::string("evaluation failed: ") + e.what());
    }
    if (!parse_error.empty()) t.verdict->evidence.push_back("artifact: " + parse_error);
    return t;
}

std::vector<Thought> Orchestrator::run_baseline(const bench::TaskSpec& task, const std::string& backend_id, int k,
                                                const SteeringConfig& steering) {
    if (k < 1) throw OrchestratorError("run count must be at least 1");
    backend(backend_id);
    std::vector<Thought> out;
    for (int run = 0; run < k; ++run)
        out.push_back(realize(task, generator_request(task, backend_id, run, steering), "baseline", backend_id, run));
    return out;
}

ThoughtPool Orchestrator::generate_pool(const bench::TaskSpec& task, const std::vector<std::string>& backend_ids,
                                        int k, const SteeringConfig& steering, const ThoughtCache* reuse) {
    if (backend_ids.empty()) throw OrchestratorError("thought pool needs at least one backend");
    if (k < 1) throw OrchestratorError("run count must be at least 1");
    std::vector<std::string> ids = backend_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (const auto& id : ids) backend(id);

    ThoughtPool pool;
    pool.task_id = task.id;
    std::vector<std::future<Thought>> jobs;
    for (const auto& id : ids)
        for (int run = 0; run < k; ++run) {
            if (reuse) {
                const auto it = reuse->find({id, run});
                if (it != reuse->end()) {
                    pool.thoughts.push_back(it->second);
                    continue;
                }
            }
            jobs.push_back(std::async(std::launch::async, [this, &task, &steering, id, run] {
                return realize(task, generator_request(task, id, run, steering), "baseline", id, run);
            }));
        }
    for (auto& f : jobs) pool.thoughts.push_back(f.get());
    std::sort(pool.thoughts.begin(), pool.thoughts.end(), [](const Thought& a, const Thought& b) {
        return std::tie(a.backend_id, a.run_index) < std::tie(b.backend_id, b.run_index);
    });

    nlohmann::json requests = nlohmann::json::array();
    for (const auto& t : pool.thoughts) requests.push_back({{"id", t.id}, {"digest", llm::digest(t.request)}});
    pool.provenance = {
        {"task", task.id},
        {"generators", ids},
        {"runs", k},
        {"system_prompt", pool.thoughts.front().request.system_prompt},
        {"user_prompt", task.prompt},
        {"temperature", config_.generator_temperature},
        {"max_output_tokens", config_.max_output_tokens},
        {"steering", to_json(steering)},
        {"requests", requests},
    };
    return pool;
}

llm::ChatRequest Orchestrator::build_assessor_prompt(const bench::TaskSpec& task, const ThoughtPool& pool,
                                                     const SteeringConfig& steering,
                                                     const std::string& assessor_id) const {
    if (pool.thoughts.empty()) throw OrchestratorError("EmptyPool: no thoughts to assess for task " + task.id);
    steering.validate();
    PromptTemplate custom;
    if (steering.assessor_template) {
        std::ifstream in(*steering.assessor_template, std::ios::binary);
        if (!in) throw OrchestratorError("cannot read assessor template " + steering.assessor_template->string());
        std::ostringstream ss;
        ss << in.rdbuf();
        custom = PromptTemplate::parse(ss.str());
    }
    const PromptTemplate& tmpl = steering.assessor_template ? custom : PromptTemplate::builtin();
    const bool images = steering.include_images && backend(assessor_id).supports_images();

    std::vector<const Thought*> order;
    for (const auto& t : pool.thoughts) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](const Thought* a, const Thought* b) {
        return std::tie(a->backend_id, a->run_index) < std::tie(b->backend_id, b->run_index);
    });
    if (order.size() > static_cast<std::size_t>(steering.max_thoughts)) order.resize(steering.max_thoughts);

    llm::ChatRequest req;
    req.backend_id = assessor_id;
    req.system_prompt = tmpl.section("preamble");
    const std::string goal = steering.fragment("assessor_goal");
    if (!goal.empty()) req.system_prompt += "\n\n" + goal;
    req.temperature = config_.assessor_temperature;
    req.max_output_tokens = config_.max_output_tokens;
    req.request_tag = task.id + "/solomon/" + assessor_id + "/0";

    std::string text = fill(tmpl.section("task"), {{"prompt", task.prompt}, {"count", std::to_string(order.size())}});
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Thought& t = *order[i];
        const std::string number = std::to_string(i + 1);
        std::string status;
        std::string stderr_tail = "(empty)";
        if (t.outcome) {
            status = sandbox::to_string(t.outcome->status);
            if (t.outcome->exit_code) status += " (exit code " + std::to_string(*t.outcome->exit_code) + ")";
            if (!t.outcome->stderr_text.empty())
                stderr_tail = trim_newlines(sandbox::tail_bytes(t.outcome->stderr_text, steering.error_log_tail_bytes));
        } else {
            status = t.error.empty() ? "not executed" : "not executed: " + t.error;
        }
        const std::string code = t.code ? "```python\n" + trim_newlines(*t.code) + "\n```" : "no code produced";
        text += "\n\n" + fill(tmpl.section("thought"),
                              {{"number", number}, {"code", code}, {"status", status}, {"stderr", stderr_tail}});
        if (steering.include_prose && !tmpl.section("thought_prose").empty())
            text += "\n\n" + fill(tmpl.section("thought_prose"), {{"number", number}, {"prose", t.response.text}});
        if (images && t.render) {
            text += "\n\n" + fill(tmpl.section("image"), {{"number", number}});
            req.messages.push_back({"user", text, {*t.render}});
            text.clear();
        }
    }
    std::string closing = tmpl.section("closing");
    const std::string focus = steering.fragment("assessor_focus");
    if (!focus.empty()) closing += "\n\n" + focus;
    text += (text.empty() ? "" : "\n\n") + closing;
    req.messages.push_back({"user", text, {}});
    return req;
}

Thought Orchestrator::run_solomon(const bench::TaskSpec& task, const ThoughtPool& pool, const std::string& assessor_id,
                                  const SteeringConfig& steering) {
    const auto req = build_assessor_prompt(task, pool, steering, assessor_id);
    Thought t = realize(task, req, "solomon", assessor_id, 0);
    const std::string prov = pool.provenance.dump();
    t.pool_digest = llm::sha256_hex(prov.data(), prov.size());
    return t;
}

}  // namespace solomon::orch
