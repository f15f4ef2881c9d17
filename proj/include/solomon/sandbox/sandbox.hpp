// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

namespace solomon::sandbox {

enum class ExecStatus { ok, nonzero_exit, timeout, no_artifact, spawn_failure };

const char* to_string(ExecStatus status);
ExecStatus exec_status_from_string(const std::string& name);

struct Artifact {
    std::string name;  // path relative to the workdir
    std::vector<uint8_t> payload;
};

struct ExecutionOutcome {
    ExecStatus status = ExecStatus::spawn_failure;
    std::optional<int> exit_code;
    std::string stdout_text;
    std::string stderr_text;
    bool stdout_truncated = false;
    bool stderr_truncated = false;
    double duration_seconds = 0;
    std::vector<Artifact> artifacts;
    // Index into artifacts of the selected primary artifact.
    std::optional<std::size_t> primary;
    std::vector<std::string> sanitizer_hits;
    std::vector<std::string> warnings;

    const Artifact* primary_artifact() const { return primary ? &artifacts.at(*primary) : nullptr; }
};

class NoCodeBlock : public std::runtime_error {
public:
    NoCodeBlock() : std::runtime_error("NoCodeBlock: response contains no fenced code block") {}
};

struct ExtractedCode {
    std::string source;
    std::vector<std::string> warnings;  // MultipleBlocks, UntaggedBlock
};

// First ```python fenced block; falls back to the first untagged fence.
ExtractedCode extract_code(const std::string& response);

struct SanitizeResult {
    std::string source;
    std::vector<std::string> removed_lines;
};

const std::vector<std::string>& default_blocklist();

// Removes every line containing any blocklist pattern (plain substring match).
SanitizeResult sanitize(const std::string& source, const std::vector<std::string>& blocklist = default_blocklist());

struct ExecutionLimits {
    std::vector<std::string> interpreter = {"python3"};
    double timeout_seconds = 120;
    // Address-space cap for the child; 0 disables it.
    uint64_t memory_bytes = uint64_t{4} << 30;
    std::size_t log_cap_bytes = 256 * 1024;
    std::string source_extension = "py";
    std::vector<std::string> artifact_extensions = {".gds", ".gds2", ".gdsii"};
    // Seconds allowed for the killed process group to be reaped.
    double grace_seconds = 2;
};

// Keeps the last `cap` bytes of `text`, starting on a line boundary, with a marker line prepended.
std::string tail_bytes(const std::string& text, std::size_t cap, bool* truncated = nullptr);

// Runs `source` under `limits` in `workdir`, which must exist and be empty.
// Layout: source.<ext>, stdout.txt, stderr.txt, artifacts wherever the code writes them.
ExecutionOutcome execute(const std::string& source, const ExecutionLimits& limits,
                         const std::filesystem::path& workdir);

// Caps concurrent executions across threads.
class WorkerPool {
public:
    explicit WorkerPool(int max_workers);
    ExecutionOutcome execute(const std::string& source, const ExecutionLimits& limits,
                             const std::filesystem::path& workdir);
    int max_workers() const { return max_workers_; }

private:
    int max_workers_;
    std::counting_semaphore<1024> slots_;
};

}  // namespace solomon::sandbox
