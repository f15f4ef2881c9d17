// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "solomon/geometry/types.hpp"

namespace solomon::gds {

enum class GdsErrc {
    truncated_stream,
    malformed_record,
    missing_units,
    name_too_long,
    coordinate_overflow,
    out_of_range,
    cyclic_reference,
    dangling_reference,
    ambiguous_top,
    invalid_library,
};

const char* to_string(GdsErrc code);

class GdsError : public std::runtime_error {
public:
    GdsError(GdsErrc code, const std::string& what);
    GdsErrc code() const { return code_; }

private:
    GdsErrc code_;
};

// year, month, day, hour, minute, second
using Timestamp = std::array<int16_t, 6>;

struct IntPoint {
    int64_t x = 0;
    int64_t y = 0;

    friend bool operator==(const IntPoint&, const IntPoint&) = default;
};

enum class ElementKind { boundary, path, text, sref, aref };

const char* to_string(ElementKind kind);

struct Element {
    ElementKind kind = ElementKind::boundary;
    int layer = 0;
    // DATATYPE for boundary/path, TEXTTYPE for text.
    int datatype = 0;
    std::vector<IntPoint> xy;

    // Path
    int32_t width = 0;
    int pathtype = 0;

    // Text
    std::string text;
    std::optional<uint16_t> presentation;

    // Sref / Aref (transform also applies to text)
    std::string ref_name;
    bool reflect_x = false;
    bool abs_magnification = false;
    bool abs_angle = false;
    double magnification = 1.0;
    double angle_degrees = 0.0;
    int columns = 1;
    int rows = 1;

    friend bool operator==(const Element&, const Element&) = default;
};

struct Structure {
    std::string name;
    std::array<Timestamp, 2> timestamps{};
    std::vector<Element> elements;

    friend bool operator==(const Structure&, const Structure&) = default;
};

struct Library {
    std::string name = "LIB";
    double user_unit_per_db_unit = 1e-3;
    double meters_per_db_unit = 1e-9;
    std::array<Timestamp, 2> timestamps{};
    std::vector<Structure> structures;
    // Notes about skipped or repaired records; not serialized.
    std::vector<std::string> warnings;

    const Structure* find(const std::string& structure_name) const;

    // Equality ignores warnings.
    friend bool operator==(const Library& a, const Library& b) {
        return a.name == b.name && a.user_unit_per_db_unit == b.user_unit_per_db_unit &&
               a.meters_per_db_unit == b.meters_per_db_unit && a.timestamps == b.timestamps &&
               a.structures == b.structures;
    }
};

// Excess-64 base-16 real: sign bit, 7-bit exponent, 56-bit mantissa.
double decode_real64(std::span<const uint8_t, 8> bytes);
std::array<uint8_t, 8> encode_real64(double value);

Library parse_gdsii(std::span<const uint8_t> bytes);
Library read_gdsii_file(const std::string& path);

struct WriteOptions {
    // When set, library and structure timestamps come from this clock instead of the model.
    std::function<Timestamp()> clock;
};

std::vector<uint8_t> write_gdsii(const Library& lib, const WriteOptions& options = {});
void write_gdsii_file(const Library& lib, const std::string& path, const WriteOptions& options = {});

// Throws GdsError(invalid_library) describing the first broken invariant.
void validate(const Library& lib);

enum class TopSelection {
    named,     // use FlattenOptions::top
    automatic, // the unique unreferenced structure; AmbiguousTop otherwise
    all_tops,  // merge every unreferenced structure
};

struct FlattenOptions {
    TopSelection selection = TopSelection::automatic;
    std::string top;
};

FlatLayout flatten(const Library& lib, const FlattenOptions& options = {});

// Single-cell library holding every polygon as a BOUNDARY and every label as
// TEXT, with coordinates rounded to the database grid.
Library library_from_layout(const FlatLayout& layout, double meters_per_db_unit = 1e-9,
                            const std::string& cell = "TOP");

// Names of structures that no other structure references, in library order.
std::vector<std::string> top_structures(const Library& lib);

}  // namespace solomon::gds
