// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "solomon/geometry/geometry.hpp"

namespace solomon::geom {

namespace {

constexpr double kMiterLimit = 2.0;  // in half-widths
constexpr int kCapSegments = 16;

double norm(Point p) { return std::hypot(p.x, p.y); }
double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

}  // namespace

std::vector<Polygon> expand_path(const std::vector<Point>& input, double width, PathType type) {
    if (!(width > 0)) throw GeometryError(GeomErrc::invalid_argument, "path width must be positive");
    std::vector<Point> pts;
    for (const auto& p : input)
        if (pts.empty() || !(pts.back() == p)) pts.push_back(p);
    if (pts.size() < 2) throw GeometryError(GeomErrc::degenerate_path, "path has no segment of nonzero length");

    const double hw = width / 2;
    const std::size_t nseg = pts.size() - 1;
    std::vector<Point> dir(nseg), nrm(nseg);
    for (std::size_t i = 0; i < nseg; ++i) {
        const Point d = pts[i + 1] - pts[i];
        const double len = norm(d);
        dir[i] = d * (1.0 / len);
        nrm[i] = {-dir[i].y, dir[i].x};
    }

    if (type == PathType::square) {
        pts.front() = pts.front() - dir.front() * hw;
        pts.back() = pts.back() + dir.back() * hw;
    }

    std::vector<Polygon> out;
    out.reserve(2 * nseg + 1);
    for (std::size_t i = 0; i < nseg; ++i) {
        const Point a = pts[i], b = pts[i + 1], n = nrm[i] * hw;
        out.push_back(Polygon{{a + n, a - n, b - n, b + n}});
    }

    // Fill the outside of every interior turn.
    for (std::size_t i = 1; i < nseg; ++i) {
        const double turn = cross(dir[i - 1], dir[i]);
        const double dot = dir[i - 1].x * dir[i].x + dir[i - 1].y * dir[i].y;
        if (std::fabs(turn) < 1e-12 && dot > 0) continue;  // collinear
        const Point v = pts[i];
        // Left turn leaves a gap on the right (negative normal) side and vice versa.
        const double side = turn > 0 ? -1.0 : 1.0;
        const Point p0 = v + nrm[i - 1] * (side * hw);
        const Point p1 = v + nrm[i] * (side * hw);
        const Point bisector = nrm[i - 1] + nrm[i];
        const double bl = norm(bisector);
        bool mitered = false;
        if (bl > 1e-12) {
            // Miter tip distance from the vertex is hw / cos(theta/2).
            const double cos_half = bl / 2;
            const double miter = hw / cos_half;
            if (miter <= kMiterLimit * hw) {
                const Point tip = v + bisector * (side * miter / bl);
                out.push_back(Polygon{{v, p0, tip, p1}});
                mitered = true;
            }
        }
        if (!mitered) out.push_back(Polygon{{v, p0, p1}});
    }

    if (type == PathType::round) {
        const auto cap = [&](Point center, Point outward) {
            Polygon c;
            const double base = std::atan2(outward.y, outward.x) - std::numbers::pi / 2;
            for (int k = 0; k <= kCapSegments; ++k) {
                const double a = base + std::numbers::pi * k / kCapSegments;
                c.vertices.push_back({center.x + hw * std::cos(a), center.y + hw * std::sin(a)});
            }
            out.push_back(std::move(c));
        };
        cap(pts.front(), dir.front() * -1.0);
        cap(pts.back(), dir.back());
    }
    return out;
}

}  // namespace solomon::geom
