// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "solomon/bench/benchmark.hpp"
#include "solomon/llm/backend.hpp"

namespace solomon::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitReplayMiss = 3;
// evaluate: correct exits 0, the other categories 10..13.
int evaluate_exit_code(eval::Category c);

struct BackendRoles {
    std::vector<std::string> baseline;
    std::vector<std::string> generators;
    std::vector<std::string> assessors;
};

// Backends file: {"backends": [...], "roles": {"baseline", "generators", "assessors"}}.
// Missing roles default to every configured backend.
struct BackendSetup {
    std::vector<llm::BackendConfig> configs;
    BackendRoles roles;

    const llm::BackendConfig& config(const std::string& id) const;
};

BackendSetup backend_setup_from_json(const nlohmann::json& j);
BackendSetup load_backend_setup(const std::filesystem::path& file);

enum class StoreMode { live, replay, record };

// Backends for `ids`. Replay and record modes use `store`, which must outlive them.
// Live and record modes read credentials now, so a missing variable fails here.
std::map<std::string, std::shared_ptr<llm::Backend>> make_backends(const BackendSetup& setup,
                                                                   const std::vector<std::string>& ids,
                                                                   StoreMode mode, const llm::ReplayStore* store);

// Current UTC time as 2026-01-01T00:00:00Z.
std::string utc_now();

struct InteractResult {
    int iterations = 0;
    std::optional<eval::Category> last;
    std::filesystem::path transcript;
};

// Human feedback loop: each input line (empty line = no extra feedback) triggers
// one generation; "quit" or end of input stops. Transcript and renders go under
// `transcripts_dir`.
InteractResult interact(orch::Orchestrator& orchestrator, const bench::TaskSpec& task, const std::string& backend_id,
                        const orch::SteeringConfig& steering, std::istream& in, std::ostream& out,
                        const std::filesystem::path& transcripts_dir);

// Entry point of the `solomon` tool.
int main_entry(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace solomon::cli
