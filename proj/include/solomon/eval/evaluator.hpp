// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "solomon/geometry/types.hpp"
#include "solomon/sandbox/sandbox.hpp"

namespace solomon::eval {

enum class Category { correct, scaling_error, partially_correct, shape_error, runtime_error };

const char* to_string(Category c);
Category category_from_string(const std::string& name);

// Higher is better; runtime_error ranks below everything for tie-breaking only.
int category_rank(Category c);

enum class EvalErrc { empty_layout, missing_layer, invalid_options };

class EvalError : public std::runtime_error {
public:
    EvalError(EvalErrc code, const std::string& what);
    EvalErrc code() const { return code_; }

private:
    EvalErrc code_;
};

// exact: truth layer (L, D) is compared with candidate layer (L, D).
// geometric: each truth layer is paired with a distinct candidate layer so
// that the summed IoU is maximal; for prompts that never name layer numbers.
enum class LayerMatching { exact, geometric };

struct EvalOptions {
    double theta_correct = 0.95;
    double theta_partial = 0.5;
    std::vector<double> scale_hypotheses = {1e-6, 1e-3, 1.0, 1e3, 1e6};
    bool allow_translation = false;
    double text_relief = 0.7;
    int resolution = 2048;
    LayerMatching layer_matching = LayerMatching::exact;
    // Label position tolerance in meters; 0 picks 2% of the truth extent.
    double text_tolerance = 0;

    void validate() const;
};

void to_json(nlohmann::json& j, const EvalOptions& o);
// Applies the keys present in `j` on top of `o`.
void apply_overrides(EvalOptions& o, const nlohmann::json& j);

struct LayerScore {
    LayerKey truth_layer;
    std::optional<LayerKey> candidate_layer;
    double iou = 0;
    bool text_bearing = false;
    double threshold = 0;
    bool passed() const { return iou >= threshold; }
};

struct ScaleTrial {
    double scale = 1;
    Point offset;  // translation applied after scaling
    std::vector<LayerScore> layers;
    double min_iou = 0;
    double mean_iou = 0;
    bool all_pass = false;
    std::size_t pass_count = 0;
};

struct ScaleReport {
    double best_scale = 1;
    std::size_t best_index = 0;
    std::vector<ScaleTrial> trials;  // one per hypothesis, in option order
    std::vector<std::string> notes;
};

// Scores `candidate` against `truth` under every scale hypothesis.
ScaleReport detect_scale(const FlatLayout& candidate, const FlatLayout& truth, const EvalOptions& opts);

struct Verdict {
    Category category = Category::runtime_error;
    double best_scale = 1;
    std::map<std::string, double> per_layer_scores;
    int matched_ground_truth = -1;
    std::vector<std::string> evidence;
    double confidence = 0;
};

void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

struct ViaRuleSet {
    double via_radius = 0;
    double pad_radius = 0;
    double metal_width = 0;
    double metal_length = 0;
    Point via_centers[2];
    double pad_margin = 0;
    double via_edge_space = 0;
    LayerKey via_layer{2, 0};
    LayerKey metal_layer{1, 0};
    LayerKey pad_layer{3, 0};

    void validate() const;
};

void to_json(nlohmann::json& j, const ViaRuleSet& r);
// Lengths in the JSON are multiplied by `unit` (meters per JSON unit).
ViaRuleSet via_rules_from_json(const nlohmann::json& j, double unit);

enum class ViaCheck { circular_via, via_coverage, metal_width, pad_concentric, pad_margin, via_edge_space };

// Single-letter code a..f.
char check_letter(ViaCheck c);

struct ViaViolation {
    ViaCheck check;
    int via_index;
    std::string message;
};

std::vector<ViaViolation> check_via_rules(const FlatLayout& layout, const ViaRuleSet& rules);

struct TextMatchReport {
    std::vector<std::pair<std::size_t, std::size_t>> matched;  // (truth index, candidate index)
    std::vector<std::size_t> unmatched_truth;
    std::vector<std::size_t> unmatched_candidate;
    bool all_matched() const { return unmatched_truth.empty() && unmatched_candidate.empty(); }
};

// `match_layers` false ignores layer and texttype.
TextMatchReport compare_texts(const std::vector<TextLabel>& candidate, const std::vector<TextLabel>& truth,
                              double tolerance, bool match_layers = true);

// What classify needs from a task: its acceptable truths and optional via rules.
struct EvalTarget {
    std::vector<FlatLayout> ground_truths;
    std::optional<ViaRuleSet> via_rules;
};

Verdict classify(const sandbox::ExecutionOutcome& outcome, const FlatLayout* candidate, const EvalTarget& target,
                 const EvalOptions& opts);

// Verdict for a candidate that parsed; runs rules (2) to (5).
Verdict classify_layout(const FlatLayout& candidate, const EvalTarget& target, const EvalOptions& opts);

// Parses and flattens the primary artifact of `outcome` (all top cells).
struct ArtifactParse {
    std::optional<FlatLayout> layout;
    std::string error;
};
ArtifactParse parse_artifact(const sandbox::ExecutionOutcome& outcome);

}  // namespace solomon::eval
