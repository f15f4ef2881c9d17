// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "solomon/geometry/geometry.hpp"

namespace solomon::geom {

const char* to_string(GeomErrc code) {
    switch (code) {
        case GeomErrc::invalid_n: return "InvalidN";
        case GeomErrc::invalid_radius: return "InvalidRadius";
        case GeomErrc::invalid_argument: return "InvalidArgument";
        case GeomErrc::degenerate_path: return "DegeneratePath";
        case GeomErrc::empty_frame: return "EmptyFrame";
        case GeomErrc::frame_mismatch: return "FrameMismatch";
    }
    return "GeometryError";
}

GeometryError::GeometryError(GeomErrc code, const std::string& what)
    : std::invalid_argument(std::string(to_string(code)) + ": " + what), code_(code) {}

double circumradius(int n, double edge) { return edge / (2 * std::sin(std::numbers::pi / n)); }

Polygon regular_polygon(int n, double edge, Point center, double start_angle) {
    if (n < 3) throw GeometryError(GeomErrc::invalid_n, "a regular polygon needs n >= 3, got " + std::to_string(n));
    if (!(edge > 0)) throw GeometryError(GeomErrc::invalid_argument, "edge length must be positive");
    const double r = circumradius(n, edge);
    Polygon poly;
    poly.vertices.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double a = start_angle + 2 * std::numbers::pi * k / n;
        poly.vertices.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    return poly;
}

int circle_vertex_count(double radius, double max_chord_error) {
    if (!(radius > 0)) throw GeometryError(GeomErrc::invalid_radius, "radius must be positive");
    if (!(max_chord_error > 0)) throw GeometryError(GeomErrc::invalid_argument, "chord error must be positive");
    constexpr int kMinVertices = 8;
    if (max_chord_error >= radius) return kMinVertices;
    // Sagitta r(1 - cos(pi/n)) <= error.
    const double half_angle = std::acos(1 - max_chord_error / radius);
    const int n = static_cast<int>(std::ceil(std::numbers::pi / half_angle - 1e-9));
    return std::max(n, kMinVertices);
}

Polygon circle(double radius, Point center, double max_chord_error) {
    const int n = circle_vertex_count(radius, max_chord_error);
    Polygon poly;
    poly.vertices.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double a = 2 * std::numbers::pi * k / n;
        poly.vertices.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    return poly;
}

Polygon ellipse(double semi_x, double semi_y, Point center, double max_chord_error) {
    if (!(semi_x > 0) || !(semi_y > 0)) throw GeometryError(GeomErrc::invalid_radius, "semi-axes must be positive");
    const int n = circle_vertex_count(std::max(semi_x, semi_y), max_chord_error);
    Polygon poly;
    poly.vertices.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double a = 2 * std::numbers::pi * k / n;
        poly.vertices.push_back({center.x + semi_x * std::cos(a), center.y + semi_y * std::sin(a)});
    }
    return poly;
}

Polygon rectangle(Point a, Point b) {
    const double x0 = std::min(a.x, b.x), x1 = std::max(a.x, b.x);
    const double y0 = std::min(a.y, b.y), y1 = std::max(a.y, b.y);
    return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

Polygon annulus(double outer_radius, double inner_radius, Point center, double max_chord_error) {
    if (!(inner_radius > 0) || !(outer_radius > inner_radius))
        throw GeometryError(GeomErrc::invalid_radius, "annulus needs 0 < inner < outer");
    Polygon outer = circle(outer_radius, center, max_chord_error);
    Polygon inner = circle(inner_radius, center, max_chord_error);
    Polygon ring;
    ring.vertices = outer.vertices;
    ring.vertices.push_back(outer.vertices.front());
    // Inner ring clockwise, starting and ending on the slit at angle 0.
    ring.vertices.push_back(inner.vertices.front());
    for (auto it = inner.vertices.rbegin(); it != inner.vertices.rend(); ++it) ring.vertices.push_back(*it);
    return ring;
}

}  // namespace solomon::geom
