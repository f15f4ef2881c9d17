// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "solomon/eval/evaluator.hpp"
#include "solomon/geometry/geometry.hpp"

namespace solomon::eval {

namespace {

constexpr double kCircularity = 0.05;    // radial deviation, fraction of via radius
constexpr double kCoverage = 0.999;      // covered fraction of the via disk
constexpr double kConcentricity = 0.05;  // fraction of pad radius
constexpr int kCoverageResolution = 512;

double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string um(double meters) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g um", meters * 1e6);
    return buf;
}

const std::vector<Polygon>& layer_or_throw(const FlatLayout& layout, LayerKey key, const char* role) {
    const auto it = layout.layers.find(key);
    if (it == layout.layers.end() || it->second.empty())
        throw EvalError(EvalErrc::missing_layer, std::string(role) + " layer " + to_string(key) + " is absent");
    return it->second;
}

bool contains(const Polygon& poly, Point p) {
    bool inside = false;
    const auto& v = poly.vertices;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y) &&
            p.x < (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x)
            inside = !inside;
    }
    return inside;
}

const Polygon* nearest(const std::vector<Polygon>& polys, Point p) {
    const Polygon* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& poly : polys) {
        const double d = dist(centroid(poly), p);
        if (d < best_d) {
            best_d = d;
            best = &poly;
        }
    }
    return best;
}

const Polygon* containing_or_nearest(const std::vector<Polygon>& polys, Point p) {
    for (const auto& poly : polys)
        if (contains(poly, p)) return &poly;
    return nearest(polys, p);
}

std::pair<double, double> extent(const Polygon& poly, Point axis) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : poly.vertices) {
        lo = std::min(lo, dot(v, axis));
        hi = std::max(hi, dot(v, axis));
    }
    return {lo, hi};
}

double max_radius(const Polygon& poly, Point center) {
    double r = 0;
    for (const auto& v : poly.vertices) r = std::max(r, dist(v, center));
    return r;
}

}  // namespace

std::vector<ViaViolation> check_via_rules(const FlatLayout& layout, const ViaRuleSet& rules) {
    rules.validate();
    const auto& vias = layer_or_throw(layout, rules.via_layer, "via");
    const auto& metal = layer_or_throw(layout, rules.metal_layer, "metal");
    const auto& pads = layer_or_throw(layout, rules.pad_layer, "pad");

    const Point span = rules.via_centers[1] - rules.via_centers[0];
    const Point u = span * (1.0 / std::hypot(span.x, span.y));
    const Point v = {-u.y, u.x};
    const double tol = 1e-3 * rules.via_radius;

    std::vector<ViaViolation> out;
    for (int i = 0; i < 2; ++i) {
        const Point c = rules.via_centers[i];
        const auto add = [&](ViaCheck check, std::string msg) {
            out.push_back({check, i, "via " + std::to_string(i + 1) + ": " + std::move(msg)});
        };

        const Polygon* via = nearest(vias, c);
        const Point vc = centroid(*via);
        if (dist(vc, c) > rules.via_radius) {
            add(ViaCheck::circular_via, "no via polygon within one radius of the required center");
        } else {
            double deviation = 0;
            for (const auto& p : via->vertices) deviation = std::max(deviation, std::fabs(dist(p, vc) - rules.via_radius));
            if (deviation > kCircularity * rules.via_radius)
                add(ViaCheck::circular_via, "radial deviation " + um(deviation) + " exceeds 5% of the via radius");

            const auto box = bounding_box(*via);
            const geom::RasterFrame frame = geom::frame_for(*box, kCoverageResolution);
            const auto via_mask = geom::rasterize({*via}, frame);
            const auto metal_mask = geom::rasterize(metal, frame);
            const std::size_t area = via_mask.count();
            const double covered = area ? static_cast<double>(via_mask.intersection_count(metal_mask)) / area : 0;
            if (covered < kCoverage) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "metal covers %.2f%% of the via", covered * 100);
                add(ViaCheck::via_coverage, buf);
            }
        }

        const Polygon* wire = containing_or_nearest(metal, c);
        const auto [m_lo, m_hi] = extent(*wire, v);
        if (m_hi - m_lo < 2 * rules.via_radius - tol)
            add(ViaCheck::metal_width, "metal width " + um(m_hi - m_lo) + " is narrower than the via diameter " +
                                           um(2 * rules.via_radius));

        const Polygon* pad = nearest(pads, c);
        const Point pc = centroid(*pad);
        if (dist(pc, c) > kConcentricity * rules.pad_radius)
            add(ViaCheck::pad_concentric, "pad center is " + um(dist(pc, c)) + " from the via center");

        const double pad_r = max_radius(*pad, pc);
        const double pad_lo = dot(pc, v) - pad_r, pad_hi = dot(pc, v) + pad_r;
        const double margin = std::min(pad_hi - m_hi, m_lo - pad_lo);
        if (margin < rules.pad_margin - tol)
            add(ViaCheck::pad_margin, "margin between metal edge and pad edge is " + um(margin) + ", needs " +
                                          um(rules.pad_margin));

        const auto [a, b] = extent(*wire, u);
        const double end_space = std::min(dot(c, u) - a, b - dot(c, u));
        if (end_space < rules.via_edge_space - tol)
            add(ViaCheck::via_edge_space, "via center is " + um(end_space) + " from the metal end, needs " +
                                              um(rules.via_edge_space));
    }
    return out;
}

}  // namespace solomon::eval
