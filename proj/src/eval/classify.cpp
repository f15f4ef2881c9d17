// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include "solomon/eval/evaluator.hpp"
#include "solomon/gds/gds.hpp"
#include "solomon/geometry/geometry.hpp"

namespace solomon::eval {

namespace {

constexpr int kCoarseResolution = 256;

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string fmt_scale(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", s);
    return buf;
}

bool is_empty(const FlatLayout& layout) { return !layout.has_polygons() && layout.texts.empty(); }

double diag(const Box& b) { return std::hypot(b.width(), b.height()); }

struct TruthModel {
    const FlatLayout& truth;
    std::vector<LayerKey> poly_layers;
    std::map<LayerKey, std::vector<TextLabel>> text_layers;
    std::vector<LayerKey> required;
    std::optional<Box> box;
    double tolerance = 0;
};

TruthModel make_model(const FlatLayout& truth, const EvalOptions& opts) {
    TruthModel m{truth, {}, {}, {}, bounding_box(truth), 0};
    for (const auto& [key, polys] : truth.layers)
        if (!polys.empty()) m.poly_layers.push_back(key);
    for (const auto& t : truth.texts) m.text_layers[{t.layer, t.texttype}].push_back(t);
    std::set<LayerKey> all(m.poly_layers.begin(), m.poly_layers.end());
    for (const auto& [key, labels] : m.text_layers) all.insert(key);
    m.required.assign(all.begin(), all.end());
    if (opts.text_tolerance > 0) m.tolerance = opts.text_tolerance;
    else if (m.box && diag(*m.box) > 0) m.tolerance = 0.02 * diag(*m.box);
    else m.tolerance = 1e-4;
    return m;
}

// Injective truth->candidate assignment maximizing summed IoU; identical keys
// win ties.
std::vector<int> best_assignment(const std::vector<std::vector<double>>& iou, const std::vector<LayerKey>& truth_keys,
                                 const std::vector<LayerKey>& cand_keys) {
    const std::size_t nt = truth_keys.size(), nc = cand_keys.size();
    std::vector<int> current(nt, -1), best(nt, -1);
    std::vector<bool> used(nc, false);
    double best_value = -1;
    std::function<void(std::size_t, double)> walk = [&](std::size_t t, double value) {
        if (t == nt) {
            if (value > best_value) {
                best_value = value;
                best = current;
            }
            return;
        }
        current[t] = -1;
        walk(t + 1, value);
        for (std::size_t c = 0; c < nc; ++c) {
            if (used[c]) continue;
            used[c] = true;
            current[t] = static_cast<int>(c);
            const double bonus = (truth_keys[t] == cand_keys[c]) ? 1e-9 : 0;
            walk(t + 1, value + iou[t][c] + bonus);
            used[c] = false;
        }
        current[t] = -1;
    };
    walk(0, 0);
    return best;
}

Point label_anchor(const std::vector<TextLabel>& labels) {
    Point sum;
    for (const auto& l : labels) sum = sum + l.position;
    return sum * (1.0 / static_cast<double>(labels.size()));
}

ScaleTrial score(const TruthModel& m, const FlatLayout& cand, const EvalOptions& opts, int resolution, double scale,
                 Point offset) {
    ScaleTrial trial;
    trial.scale = scale;
    trial.offset = offset;

    std::vector<LayerKey> cand_keys;
    for (const auto& [key, polys] : cand.layers)
        if (!polys.empty()) cand_keys.push_back(key);

    std::map<LayerKey, std::pair<double, std::optional<LayerKey>>> poly_scores;
    std::set<LayerKey> assigned;
    const auto cand_box = bounding_box(cand);
    if (!m.poly_layers.empty()) {
        Box box = *m.box;
        if (cand_box) box = merge(box, *cand_box);
        const geom::RasterFrame frame = geom::frame_for(box, resolution);
        std::vector<geom::RasterMask> truth_masks, cand_masks;
        for (const auto& key : m.poly_layers) truth_masks.push_back(geom::rasterize(m.truth, key, frame));
        std::vector<std::vector<double>> iou(m.poly_layers.size(), std::vector<double>(cand_keys.size(), 0));
        for (std::size_t c = 0; c < cand_keys.size(); ++c) {
            const auto mask = geom::rasterize(cand, cand_keys[c], frame);
            for (std::size_t t = 0; t < m.poly_layers.size(); ++t) {
                if (opts.layer_matching == LayerMatching::exact && !(m.poly_layers[t] == cand_keys[c])) continue;
                // A truth layer below pixel size cannot be judged in this frame.
                if (truth_masks[t].empty()) continue;
                iou[t][c] = geom::layer_iou(truth_masks[t], mask);
            }
        }
        std::vector<int> pick(m.poly_layers.size(), -1);
        if (opts.layer_matching == LayerMatching::exact) {
            for (std::size_t t = 0; t < m.poly_layers.size(); ++t)
                for (std::size_t c = 0; c < cand_keys.size(); ++c)
                    if (m.poly_layers[t] == cand_keys[c]) pick[t] = static_cast<int>(c);
        } else {
            pick = best_assignment(iou, m.poly_layers, cand_keys);
        }
        for (std::size_t t = 0; t < m.poly_layers.size(); ++t) {
            if (pick[t] < 0) {
                poly_scores[m.poly_layers[t]] = {0.0, std::nullopt};
            } else {
                poly_scores[m.poly_layers[t]] = {iou[t][pick[t]], cand_keys[pick[t]]};
                assigned.insert(cand_keys[pick[t]]);
            }
        }
    }

    for (const auto& key : m.required) {
        LayerScore ls;
        ls.truth_layer = key;
        const auto poly = poly_scores.find(key);
        const auto text = m.text_layers.find(key);
        ls.text_bearing = text != m.text_layers.end();
        double text_score = 0;
        if (ls.text_bearing) {
            const auto& want = text->second;
            const bool by_layer = opts.layer_matching == LayerMatching::exact;
            const auto report = compare_texts(cand.texts, want, m.tolerance, by_layer);
            text_score = static_cast<double>(report.matched.size()) / static_cast<double>(want.size());
            std::optional<LayerKey> text_layer;
            if (text_score > 0 && !report.matched.empty()) {
                const auto& hit = cand.texts[report.matched.front().second];
                text_layer = LayerKey{hit.layer, hit.texttype};
            } else {
                // Text drawn as polygons: judge placement of the glyph block.
                const Point anchor = label_anchor(want);
                for (const auto& ck : cand_keys) {
                    if (by_layer ? !(ck == key) : assigned.count(ck) > 0) continue;
                    const auto b = bounding_box(cand.layers.at(ck));
                    if (!b) continue;
                    const Point c = b->center();
                    const double d = std::hypot(c.x - anchor.x, c.y - anchor.y);
                    const double s = std::max(0.0, 1.0 - d / m.tolerance);
                    if (s > text_score) {
                        text_score = s;
                        text_layer = ck;
                    }
                }
            }
            if (poly == poly_scores.end()) ls.candidate_layer = text_layer;
        }
        if (poly != poly_scores.end()) {
            ls.candidate_layer = poly->second.second;
            ls.iou = ls.text_bearing ? 0.5 * (poly->second.first + text_score) : poly->second.first;
        } else {
            ls.iou = text_score;
        }
        ls.threshold = opts.theta_correct * (ls.text_bearing ? opts.text_relief : 1.0);
        trial.layers.push_back(ls);
    }

    double sum = 0;
    trial.min_iou = trial.layers.empty() ? 0 : 1;
    for (const auto& ls : trial.layers) {
        sum += ls.iou;
        trial.min_iou = std::min(trial.min_iou, ls.iou);
        if (ls.passed()) ++trial.pass_count;
    }
    trial.mean_iou = trial.layers.empty() ? 0 : sum / static_cast<double>(trial.layers.size());
    trial.all_pass = !trial.layers.empty() && trial.pass_count == trial.layers.size();
    return trial;
}

bool better_placement(const ScaleTrial& a, const ScaleTrial& b) {
    if (a.all_pass != b.all_pass) return a.all_pass;
    if (a.min_iou != b.min_iou) return a.min_iou > b.min_iou;
    return a.mean_iou > b.mean_iou;
}

// Better by (min IoU, mean IoU), ties toward the scale closest to 1.
bool better_scale(const ScaleTrial& a, const ScaleTrial& b) {
    if (a.min_iou != b.min_iou) return a.min_iou > b.min_iou;
    if (a.mean_iou != b.mean_iou) return a.mean_iou > b.mean_iou;
    return std::fabs(std::log10(a.scale)) < std::fabs(std::log10(b.scale));
}

ScaleTrial trial_for_scale(const TruthModel& m, const FlatLayout& cand, const EvalOptions& opts, double s) {
    const auto cbox = bounding_box(cand);
    if (!opts.allow_translation || !cbox) return score(m, transformed(cand, s), opts, opts.resolution, s, {});

    const Point c = cbox->center();
    const FlatLayout scaled = transformed(cand, s, c - c * s);
    std::vector<Point> offsets = {{0, 0}};
    if (m.box) offsets.push_back(m.box->center() - c);
    for (const auto& key : m.poly_layers) {
        const Point tc = bounding_box(m.truth.layers.at(key))->center();
        for (const auto& [ck, polys] : scaled.layers) {
            if (opts.layer_matching == LayerMatching::exact && !(ck == key)) continue;
            if (const auto b = bounding_box(polys)) offsets.push_back(tc - b->center());
        }
    }
    const double eps = 1e-9 * (m.box ? std::max(diag(*m.box), 1e-12) : 1.0);
    std::vector<Point> unique;
    for (const auto& o : offsets) {
        const bool seen = std::any_of(unique.begin(), unique.end(), [&](const Point& u) {
            return std::hypot(u.x - o.x, u.y - o.y) <= eps;
        });
        if (!seen) unique.push_back(o);
    }

    Point best_offset = unique.front();
    if (unique.size() > 1) {
        const int coarse = std::min(opts.resolution, kCoarseResolution);
        std::optional<ScaleTrial> best;
        for (const auto& o : unique) {
            auto t = score(m, translated(scaled, o), opts, coarse, s, o);
            if (!best || better_placement(t, *best)) {
                best = std::move(t);
                best_offset = o;
            }
        }
    }
    return score(m, translated(scaled, best_offset), opts, opts.resolution, s, best_offset);
}

void check_inputs(const FlatLayout& candidate, const FlatLayout& truth, const EvalOptions& opts) {
    opts.validate();
    if (is_empty(truth)) throw EvalError(EvalErrc::empty_layout, "ground truth has no polygons or labels");
    if (is_empty(candidate)) throw EvalError(EvalErrc::empty_layout, "candidate has no polygons or labels");
}

std::optional<std::string> scale_hint(const FlatLayout& candidate, const TruthModel& m, const EvalOptions& opts) {
    const auto cbox = bounding_box(candidate);
    if (!cbox || !m.box || !(diag(*cbox) > 0) || !(diag(*m.box) > 0)) return std::nullopt;
    const double ratio = diag(*m.box) / diag(*cbox);
    double nearest = 1;
    for (double s : opts.scale_hypotheses)
        if (std::fabs(std::log10(s / ratio)) < std::fabs(std::log10(nearest / ratio))) nearest = s;
    return "bounding-box diagonal ratio " + fmt_scale(ratio) + " suggests scale " + fmt_scale(nearest);
}

struct Scored {
    Verdict verdict;
    ScaleTrial trial;
};

void describe(Verdict& v, const ScaleTrial& t) {
    for (const auto& ls : t.layers) {
        v.per_layer_scores[to_string(ls.truth_layer)] = ls.iou;
        std::string line = "layer " + to_string(ls.truth_layer) + (ls.text_bearing ? " (text)" : "") + ": score " +
                           fmt(ls.iou) + " vs threshold " + fmt(ls.threshold) + " against candidate ";
        line += ls.candidate_layer ? to_string(*ls.candidate_layer) : std::string("<none>");
        v.evidence.push_back(line);
    }
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

Scored classify_against(const FlatLayout& candidate, const FlatLayout& truth, const EvalOptions& opts) {
    const TruthModel m = make_model(truth, opts);
    Scored out;
    Verdict& v = out.verdict;

    const ScaleTrial identity = trial_for_scale(m, candidate, opts, 1.0);
    if (identity.all_pass) {
        v.category = Category::correct;
        v.best_scale = 1;
        out.trial = identity;
    } else {
        std::vector<ScaleTrial> trials;
        for (double s : opts.scale_hypotheses)
            trials.push_back(s == 1.0 ? identity : trial_for_scale(m, candidate, opts, s));
        const ScaleTrial* passing = nullptr;
        const ScaleTrial* best = &trials.front();
        for (const auto& t : trials) {
            if (better_scale(t, *best)) best = &t;
            if (t.scale != 1.0 && t.all_pass && (!passing || better_scale(t, *passing))) passing = &t;
        }
        if (passing) {
            v.category = Category::scaling_error;
            v.best_scale = passing->scale;
            out.trial = *passing;
            v.evidence.push_back("all layers match after scaling the candidate by " + fmt_scale(passing->scale));
        } else {
            out.trial = *best;
            v.best_scale = best->scale;
            const std::size_t n = best->layers.size();
            const bool subset = best->pass_count > 0 && best->pass_count < n;
            if (best->mean_iou >= opts.theta_partial || subset) {
                v.category = Category::partially_correct;
                v.evidence.push_back("best scale " + fmt_scale(best->scale) + ": mean score " + fmt(best->mean_iou) +
                                     ", " + std::to_string(best->pass_count) + "/" + std::to_string(n) +
                                     " layers pass");
            } else {
                v.category = Category::shape_error;
                v.evidence.push_back("best scale " + fmt_scale(best->scale) + ": mean score " + fmt(best->mean_iou) +
                                     " below " + fmt(opts.theta_partial));
            }
        }
        if (const auto hint = scale_hint(candidate, m, opts)) v.evidence.push_back(*hint);
    }
    if (opts.allow_translation && (out.trial.offset.x != 0 || out.trial.offset.y != 0))
        v.evidence.push_back("candidate translated by (" + fmt_scale(out.trial.offset.x) + ", " +
                             fmt_scale(out.trial.offset.y) + ") m");
    describe(v, out.trial);

    const auto& t = out.trial;
    switch (v.category) {
        case Category::correct:
        case Category::scaling_error: {
            double margin = 1;
            for (const auto& ls : t.layers) margin = std::min(margin, (ls.iou - ls.threshold) / (1 - ls.threshold + 1e-12));
            v.confidence = 0.5 + 0.5 * clamp01(margin);
            break;
        }
        case Category::partially_correct:
            v.confidence =
                0.5 + 0.25 * clamp01(std::fabs(t.mean_iou - opts.theta_partial) / (opts.theta_correct - opts.theta_partial));
            break;
        default:
            v.confidence = 0.5 + 0.5 * clamp01((opts.theta_partial - t.mean_iou) / opts.theta_partial);
            break;
    }
    return out;
}

bool better_verdict(const Scored& a, const Scored& b) {
    const int ra = category_rank(a.verdict.category), rb = category_rank(b.verdict.category);
    if (ra != rb) return ra > rb;
    if (a.trial.min_iou != b.trial.min_iou) return a.trial.min_iou > b.trial.min_iou;
    return a.trial.mean_iou > b.trial.mean_iou;
}

std::string last_line(const std::string& text) {
    std::size_t end = text.find_last_not_of(" \t\r\n");
    if (end == std::string::npos) return {};
    std::size_t begin = text.rfind('\n', end);
    begin = (begin == std::string::npos) ? 0 : begin + 1;
    return text.substr(begin, end - begin + 1);
}

void add_via_evidence(Verdict& v, const FlatLayout& candidate, const ScaleTrial& trial, const ViaRuleSet& rules) {
    ViaRuleSet mapped = rules;
    for (const auto& ls : trial.layers) {
        if (!ls.candidate_layer) continue;
        if (ls.truth_layer == rules.via_layer) mapped.via_layer = *ls.candidate_layer;
        if (ls.truth_layer == rules.metal_layer) mapped.metal_layer = *ls.candidate_layer;
        if (ls.truth_layer == rules.pad_layer) mapped.pad_layer = *ls.candidate_layer;
    }
    const FlatLayout placed = translated(transformed(candidate, trial.scale), trial.offset);
    try {
        const auto violations = check_via_rules(placed, mapped);
        if (violations.empty()) v.evidence.push_back("via rules: no violations");
        for (const auto& viol : violations)
            v.evidence.push_back(std::string("via rule (") + check_letter(viol.check) + "): " + viol.message);
    } catch (const EvalError& e) {
        v.evidence.push_back(std::string("via rules not checked: ") + e.what());
    }
}

}  // namespace

ScaleReport detect_scale(const FlatLayout& candidate, const FlatLayout& truth, const EvalOptions& opts) {
    check_inputs(candidate, truth, opts);
    const TruthModel m = make_model(truth, opts);
    ScaleReport report;
    for (double s : opts.scale_hypotheses) report.trials.push_back(trial_for_scale(m, candidate, opts, s));
    for (std::size_t i = 1; i < report.trials.size(); ++i)
        if (better_scale(report.trials[i], report.trials[report.best_index])) report.best_index = i;
    report.best_scale = report.trials[report.best_index].scale;
    if (const auto hint = scale_hint(candidate, m, opts)) report.notes.push_back(*hint);
    return report;
}

Verdict classify_layout(const FlatLayout& candidate, const EvalTarget& target, const EvalOptions& opts) {
    opts.validate();
    if (target.ground_truths.empty()) throw EvalError(EvalErrc::invalid_options, "task has no ground truth");
    if (is_empty(candidate)) {
        Verdict v;
        v.category = Category::shape_error;
        v.matched_ground_truth = 0;
        v.confidence = 1;
        v.evidence.push_back("candidate layout has no polygons or labels");
        for (const auto& key : target.ground_truths.front().layer_keys()) v.per_layer_scores[to_string(key)] = 0;
        return v;
    }
    std::optional<Scored> best;
    int best_index = 0;
    for (std::size_t i = 0; i < target.ground_truths.size(); ++i) {
        check_inputs(candidate, target.ground_truths[i], opts);
        auto scored = classify_against(candidate, target.ground_truths[i], opts);
        if (!best || better_verdict(scored, *best)) {
            best = std::move(scored);
            best_index = static_cast<int>(i);
        }
        if (best->verdict.category == Category::correct && best->trial.min_iou >= 1.0) break;
    }
    Verdict v = std::move(best->verdict);
    v.matched_ground_truth = best_index;
    if (target.ground_truths.size() > 1)
        v.evidence.push_back("best of " + std::to_string(target.ground_truths.size()) + " acceptable ground truths: #" +
                             std::to_string(best_index));

    std::set<LayerKey> used;
    for (const auto& ls : best->trial.layers)
        if (ls.candidate_layer) used.insert(*ls.candidate_layer);
    int extra = 0;
    for (const auto& key : candidate.layer_keys())
        if (!used.count(key)) {
            ++extra;
            v.evidence.push_back("extra candidate layer " + to_string(key));
        }
    v.confidence *= std::pow(0.9, extra);
    if (target.via_rules) add_via_evidence(v, candidate, best->trial, *target.via_rules);
    return v;
}

Verdict classify(const sandbox::ExecutionOutcome& outcome, const FlatLayout* candidate, const EvalTarget& target,
                 const EvalOptions& opts) {
    if (outcome.status != sandbox::ExecStatus::ok || candidate == nullptr) {
        Verdict v;
        v.category = Category::runtime_error;
        v.confidence = 1;
        v.evidence.push_back(std::string("execution status: ") + sandbox::to_string(outcome.status));
        if (outcome.exit_code) v.evidence.push_back("exit code " + std::to_string(*outcome.exit_code));
        if (outcome.status == sandbox::ExecStatus::ok) v.evidence.push_back("GDSII artifact could not be parsed");
        const std::string tail = last_line(outcome.stderr_text);
        if (!tail.empty()) v.evidence.push_back("stderr: " + tail);
        for (const auto& key : target.ground_truths.empty() ? std::vector<LayerKey>{}
                                                            : target.ground_truths.front().layer_keys())
            v.per_layer_scores[to_string(key)] = 0;
        return v;
    }
    return classify_layout(*candidate, target, opts);
}

ArtifactParse parse_artifact(const sandbox::ExecutionOutcome& outcome) {
    ArtifactParse out;
    const auto* artifact = outcome.primary_artifact();
    if (!artifact) {
        out.error = "no GDSII artifact";
        return out;
    }
    try {
        const gds::Library lib = gds::parse_gdsii(artifact->payload);
        gds::FlattenOptions fo;
        fo.selection = gds::TopSelection::all_tops;
        out.layout = gds::flatten(lib, fo);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace solomon::eval
