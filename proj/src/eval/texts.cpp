// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "solomon/eval/evaluator.hpp"

namespace solomon::eval {

TextMatchReport compare_texts(const std::vector<TextLabel>& candidate, const std::vector<TextLabel>& truth,
                              double tolerance, bool match_layers) {
    TextMatchReport report;
    std::vector<bool> used(candidate.size(), false);
    for (std::size_t t = 0; t < truth.size(); ++t) {
        const auto& want = truth[t];
        std::size_t best = candidate.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < candidate.size(); ++c) {
            if (used[c]) continue;
            const auto& have = candidate[c];
            if (have.text != want.text) continue;
            if (match_layers && (have.layer != want.layer || have.texttype != want.texttype)) continue;
            const double d = std::hypot(have.position.x - want.position.x, have.position.y - want.position.y);
            if (d <= tolerance && d < best_d) {
                best = c;
                best_d = d;
            }
        }
        if (best == candidate.size()) {
            report.unmatched_truth.push_back(t);
        } else {
            used[best] = true;
            report.matched.emplace_back(t, best);
        }
    }
    for (std::size_t c = 0; c < candidate.size(); ++c)
        if (!used[c]) report.unmatched_candidate.push_back(c);
    return report;
}

}  // namespace solomon::eval
