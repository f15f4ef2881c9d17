// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace solomon {

struct Point {
    double x = 0;
    double y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }

// Implicitly closed ring; the last vertex is never a repeat of the first.
struct Polygon {
    std::vector<Point> vertices;

    friend bool operator==(const Polygon&, const Polygon&) = default;
};

struct Box {
    Point min;
    Point max;

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    Point center() const { return {(min.x + max.x) / 2, (min.y + max.y) / 2}; }
    friend bool operator==(const Box&, const Box&) = default;
};

// (layer, datatype) pair identifying a drawing layer.
struct LayerKey {
    int layer = 0;
    int datatype = 0;

    friend auto operator<=>(const LayerKey&, const LayerKey&) = default;
};

std::string to_string(LayerKey key);

struct TextLabel {
    std::string text;
    Point position;  // meters
    int layer = 0;
    int texttype = 0;

    friend bool operator==(const TextLabel&, const TextLabel&) = default;
};

// Reference-resolved geometry in physical meters.
struct FlatLayout {
    std::map<LayerKey, std::vector<Polygon>> layers;
    std::vector<TextLabel> texts;
    // Rings dropped during flattening because fewer than 3 distinct vertices remained.
    std::size_t degenerate_count = 0;
    std::vector<std::string> warnings;

    bool has_polygons() const;
    std::size_t polygon_count() const;
    // Layers carrying either polygons or text labels, ascending.
    std::vector<LayerKey> layer_keys() const;
};

double signed_area(const Polygon& poly);
double area(const Polygon& poly);
Point centroid(const Polygon& poly);

std::optional<Box> bounding_box(const Polygon& poly);
std::optional<Box> bounding_box(const std::vector<Polygon>& polys);
// Union over all polygon vertices of every layer; texts are ignored.
std::optional<Box> bounding_box(const FlatLayout& layout);
Box merge(const Box& a, const Box& b);

// Applies p -> p * factor + offset to every coordinate, labels included.
FlatLayout transformed(const FlatLayout& layout, double factor, Point offset = {});
FlatLayout translated(const FlatLayout& layout, Point offset);

}  // namespace solomon
