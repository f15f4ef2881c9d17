// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include "solomon/geometry/types.hpp"

#include <algorithm>
#include <cmath>

namespace solomon {

std::string to_string(LayerKey key) { return std::to_string(key.layer) + "/" + std::to_string(key.datatype); }

bool FlatLayout::has_polygons() const {
    return std::any_of(layers.begin(), layers.end(), [](const auto& kv) { return !kv.second.empty(); });
}

std::size_t FlatLayout::polygon_count() const {
    std::size_t n = 0;
    for (const auto& [key, polys] : layers) n += polys.size();
    return n;
}

std::vector<LayerKey> FlatLayout::layer_keys() const {
    std::vector<LayerKey> keys;
    for (const auto& [key, polys] : layers)
        if (!polys.empty()) keys.push_back(key);
    for (const auto& t : texts) {
        const LayerKey key{t.layer, t.texttype};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

double signed_area(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    if (n < 3) return 0.0;
    // Shoelace relative to the first vertex keeps cancellation small for offset shapes.
    double sum = 0.0;
    const Point o = v[0];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Point a = v[i] - o;
        const Point b = v[i + 1] - o;
        sum += a.x * b.y - b.x * a.y;
    }
    return sum / 2;
}

double area(const Polygon& poly) { return std::fabs(signed_area(poly)); }

Point centroid(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    if (n == 0) return {};
    const Point o = v[0];
    double a2 = 0, cx = 0, cy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = v[i] - o;
        const Point q = v[(i + 1) % n] - o;
        const double cross = p.x * q.y - q.x * p.y;
        a2 += cross;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    if (std::fabs(a2) < 1e-300) {
        Point mean{};
        for (const auto& p : v) mean = mean + p;
        return mean * (1.0 / static_cast<double>(n));
    }
    return {o.x + cx / (3 * a2), o.y + cy / (3 * a2)};
}

std::optional<Box> bounding_box(const Polygon& poly) {
    if (poly.vertices.empty()) return std::nullopt;
    Box b{poly.vertices[0], poly.vertices[0]};
    for (const auto& p : poly.vertices) {
        b.min.x = std::min(b.min.x, p.x);
        b.min.y = std::min(b.min.y, p.y);
        b.max.x = std::max(b.max.x, p.x);
        b.max.y = std::max(b.max.y, p.y);
    }
    return b;
}

Box merge(const Box& a, const Box& b) {
    return {{std::min(a.min.x, b.min.x), std::min(a.min.y, b.min.y)},
            {std::max(a.max.x, b.max.x), std::max(a.max.y, b.max.y)}};
}

std::optional<Box> bounding_box(const std::vector<Polygon>& polys) {
    std::optional<Box> result;
    for (const auto& poly : polys) {
        const auto b = bounding_box(poly);
        if (!b) continue;
        result = result ? merge(*result, *b) : *b;
    }
    return result;
}

std::optional<Box> bounding_box(const FlatLayout& layout) {
    std::optional<Box> result;
    for (const auto& [key, polys] : layout.layers) {
        const auto b = bounding_box(polys);
        if (!b) continue;
        result = result ? merge(*result, *b) : *b;
    }
    return result;
}

FlatLayout transformed(const FlatLayout& layout, double factor, Point offset) {
    FlatLayout out = layout;
    for (auto& [key, polys] : out.layers)
        for (auto& poly : polys)
            for (auto& p : poly.vertices) p = p * factor + offset;
    for (auto& t : out.texts) t.position = t.position * factor + offset;
    return out;
}

FlatLayout translated(const FlatLayout& layout, Point offset) { return transformed(layout, 1.0, offset); }

}  // namespace solomon
