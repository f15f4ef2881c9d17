// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "solomon/eval/evaluator.hpp"

namespace solomon::eval {

namespace {

struct CategoryName {
    Category category;
    const char* name;
};

constexpr CategoryName kCategoryNames[] = {
    {Category::correct, "correct"},
    {Category::scaling_error, "scaling_error"},
    {Category::partially_correct, "partially_correct"},
    {Category::shape_error, "shape_error"},
    {Category::runtime_error, "runtime_error"},
};

const char* errc_name(EvalErrc code) {
    switch (code) {
        case EvalErrc::empty_layout: return "EmptyLayout";
        case EvalErrc::missing_layer: return "MissingLayer";
        case EvalErrc::invalid_options: return "InvalidOptions";
    }
    return "EvalError";
}

LayerKey layer_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return {j.get<int>(), 0};
    return {j.at(0).get<int>(), j.at(1).get<int>()};
}

}  // namespace

EvalError::EvalError(EvalErrc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

const char* to_string(Category c) {
    for (const auto& entry : kCategoryNames)
        if (entry.category == c) return entry.name;
    return "runtime_error";
}

Category category_from_string(const std::string& name) {
    for (const auto& entry : kCategoryNames)
        if (name == entry.name) return entry.category;
    throw std::invalid_argument("unknown verdict category '" + name + "'");
}

int category_rank(Category c) {
    switch (c) {
        case Category::correct: return 4;
        case Category::scaling_error: return 3;
        case Category::partially_correct: return 2;
        case Category::shape_error: return 1;
        case Category::runtime_error: return 0;
    }
    return 0;
}

void EvalOptions::validate() const {
    if (!(0 < theta_partial && theta_partial < theta_correct && theta_correct <= 1))
        throw EvalError(EvalErrc::invalid_options, "thresholds must satisfy 0 < theta_partial < theta_correct <= 1");
    if (std::find(scale_hypotheses.begin(), scale_hypotheses.end(), 1.0) == scale_hypotheses.end())
        throw EvalError(EvalErrc::invalid_options, "scale hypotheses must include 1");
    for (double s : scale_hypotheses)
        if (!(s > 0) || !std::isfinite(s)) throw EvalError(EvalErrc::invalid_options, "scale hypotheses must be positive");
    if (!(text_relief > 0 && text_relief <= 1))
        throw EvalError(EvalErrc::invalid_options, "text_relief must lie in (0, 1]");
    if (resolution < 16) throw EvalError(EvalErrc::invalid_options, "resolution must be at least 16 pixels");
    if (text_tolerance < 0) throw EvalError(EvalErrc::invalid_options, "text_tolerance must be nonnegative");
}

void to_json(nlohmann::json& j, const EvalOptions& o) {
    j = nlohmann::json{
        {"theta_correct", o.theta_correct},
        {"theta_partial", o.theta_partial},
        {"scale_hypotheses", o.scale_hypotheses},
        {"allow_translation", o.allow_translation},
        {"text_relief", o.text_relief},
        {"resolution", o.resolution},
        {"layer_matching", o.layer_matching == LayerMatching::exact ? "exact" : "geometric"},
        {"text_tolerance", o.text_tolerance},
    };
}

void apply_overrides(EvalOptions& o, const nlohmann::json& j) {
    if (!j.is_object()) throw EvalError(EvalErrc::invalid_options, "evaluation overrides must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "theta_correct") o.theta_correct = value.get<double>();
        else if (key == "theta_partial") o.theta_partial = value.get<double>();
        else if (key == "scale_hypotheses") o.scale_hypotheses = value.get<std::vector<double>>();
        else if (key == "allow_translation") o.allow_translation = value.get<bool>();
        else if (key == "text_relief") o.text_relief = value.get<double>();
        else if (key == "resolution") o.resolution = value.get<int>();
        else if (key == "text_tolerance") o.text_tolerance = value.get<double>();
        else if (key == "layer_matching") {
            const auto mode = value.get<std::string>();
            if (mode == "exact") o.layer_matching = LayerMatching::exact;
            else if (mode == "geometric") o.layer_matching = LayerMatching::geometric;
            else throw EvalError(EvalErrc::invalid_options, "layer_matching must be 'exact' or 'geometric'");
        } else {
            throw EvalError(EvalErrc::invalid_options, "unknown evaluation option '" + key + "'");
        }
    }
    o.validate();
}

void to_json(nlohmann::json& j, const Verdict& v) {
    j = nlohmann::json{
        {"category", to_string(v.category)},
        {"best_scale", v.best_scale},
        {"per_layer_scores", v.per_layer_scores},
        {"matched_ground_truth", v.matched_ground_truth},
        {"evidence", v.evidence},
        {"confidence", v.confidence},
    };
}

void from_json(const nlohmann::json& j, Verdict& v) {
    v.category = category_from_string(j.at("category").get<std::string>());
    v.best_scale = j.value("best_scale", 1.0);
    v.per_layer_scores = j.value("per_layer_scores", std::map<std::string, double>{});
    v.matched_ground_truth = j.value("matched_ground_truth", -1);
    v.evidence = j.value("evidence", std::vector<std::string>{});
    v.confidence = j.value("confidence", 0.0);
}

void ViaRuleSet::validate() const {
    for (double len : {via_radius, pad_radius, metal_width, metal_length, pad_margin, via_edge_space})
        if (!(len > 0)) throw EvalError(EvalErrc::invalid_options, "via rule lengths must be positive");
    if (via_centers[0] == via_centers[1]) throw EvalError(EvalErrc::invalid_options, "via centers must differ");
}

void to_json(nlohmann::json& j, const ViaRuleSet& r) {
    j = nlohmann::json{
        {"via_radius", r.via_radius},
        {"pad_radius", r.pad_radius},
        {"metal_width", r.metal_width},
        {"metal_length", r.metal_length},
        {"via_centers", {{r.via_centers[0].x, r.via_centers[0].y}, {r.via_centers[1].x, r.via_centers[1].y}}},
        {"pad_margin", r.pad_margin},
        {"via_edge_space", r.via_edge_space},
        {"via_layer", {r.via_layer.layer, r.via_layer.datatype}},
        {"metal_layer", {r.metal_layer.layer, r.metal_layer.datatype}},
        {"pad_layer", {r.pad_layer.layer, r.pad_layer.datatype}},
    };
}

ViaRuleSet via_rules_from_json(const nlohmann::json& j, double unit) {
    ViaRuleSet r;
    r.via_radius = j.at("via_radius").get<double>() * unit;
    r.pad_radius = j.at("pad_radius").get<double>() * unit;
    r.metal_width = j.at("metal_width").get<double>() * unit;
    r.metal_length = j.at("metal_length").get<double>() * unit;
    for (int i = 0; i < 2; ++i) {
        const auto& c = j.at("via_centers").at(i);
        r.via_centers[i] = {c.at(0).get<double>() * unit, c.at(1).get<double>() * unit};
    }
    r.pad_margin = j.at("pad_margin").get<double>() * unit;
    r.via_edge_space = j.at("via_edge_space").get<double>() * unit;
    if (j.contains("via_layer")) r.via_layer = layer_from_json(j["via_layer"]);
    if (j.contains("metal_layer")) r.metal_layer = layer_from_json(j["metal_layer"]);
    if (j.contains("pad_layer")) r.pad_layer = layer_from_json(j["pad_layer"]);
    r.validate();
    return r;
}

char check_letter(ViaCheck c) { return static_cast<char>('a' + static_cast<int>(c)); }

}  // namespace solomon::eval
