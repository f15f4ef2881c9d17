// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "records.hpp"
#include "solomon/gds/gds.hpp"

namespace solomon::gds {

const char* to_string(GdsErrc code) {
    switch (code) {
        case GdsErrc::truncated_stream: return "TruncatedStream";
        case GdsErrc::malformed_record: return "MalformedRecord";
        case GdsErrc::missing_units: return "MissingUnits";
        case GdsErrc::name_too_long: return "NameTooLong";
        case GdsErrc::coordinate_overflow: return "CoordinateOverflow";
        case GdsErrc::out_of_range: return "OutOfRange";
        case GdsErrc::cyclic_reference: return "CyclicReference";
        case GdsErrc::dangling_reference: return "DanglingReference";
        case GdsErrc::ambiguous_top: return "AmbiguousTop";
        case GdsErrc::invalid_library: return "InvalidLibrary";
    }
    return "GdsError";
}

GdsError::GdsError(GdsErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

const char* to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::boundary: return "boundary";
        case ElementKind::path: return "path";
        case ElementKind::text: return "text";
        case ElementKind::sref: return "sref";
        case ElementKind::aref: return "aref";
    }
    return "element";
}

const Structure* Library::find(const std::string& structure_name) const {
    for (const auto& s : structures)
        if (s.name == structure_name) return &s;
    return nullptr;
}

namespace {

using namespace detail;

constexpr int64_t kMaxCoordinate = 2147483647;
constexpr std::size_t kMaxStructureName = 32;
constexpr std::size_t kMaxPayload = 65535 - 4;

void invalid(const std::string& why) { throw GdsError(GdsErrc::invalid_library, why); }

void validate_element(const Element& el, const std::string& where) {
    for (const auto& p : el.xy)
        if (std::llabs(p.x) > kMaxCoordinate || std::llabs(p.y) > kMaxCoordinate)
            throw GdsError(GdsErrc::coordinate_overflow,
                           where + ": coordinate (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                               ") exceeds the int32 range");
    if (el.xy.size() * 8 > kMaxPayload) invalid(where + ": too many points for one XY record");
    if (el.layer < 0 || el.layer > 32767 || el.datatype < 0 || el.datatype > 32767)
        invalid(where + ": layer/datatype outside 0..32767");
    switch (el.kind) {
        case ElementKind::boundary:
            if (el.xy.size() < 4) invalid(where + ": boundary needs at least 4 points");
            if (!(el.xy.front() == el.xy.back())) invalid(where + ": boundary ring is not closed");
            break;
        case ElementKind::path:
            if (el.xy.size() < 2) invalid(where + ": path needs at least 2 points");
            break;
        case ElementKind::text:
        case ElementKind::sref:
            if (el.xy.size() != 1) invalid(where + ": exactly one XY point required");
            break;
        case ElementKind::aref:
            if (el.xy.size() != 3) invalid(where + ": AREF needs exactly 3 XY points");
            if (el.columns < 1 || el.rows < 1 || el.columns > 32767 || el.rows > 32767)
                invalid(where + ": AREF columns/rows out of range");
            break;
    }
    if ((el.kind == ElementKind::sref || el.kind == ElementKind::aref) && el.ref_name.empty())
        invalid(where + ": reference without a structure name");
}

class Writer {
public:
    void record(uint8_t type, uint8_t data_type, std::span<const uint8_t> payload = {}) {
        const std::size_t length = 4 + payload.size();
        out_.push_back(static_cast<uint8_t>(length >> 8));
        out_.push_back(static_cast<uint8_t>(length & 0xff));
        out_.push_back(type);
        out_.push_back(data_type);
        out_.insert(out_.end(), payload.begin(), payload.end());
    }

    void empty(uint8_t type) { record(type, NO_DATA); }

    void int16s(uint8_t type, std::initializer_list<int> values, uint8_t data_type = INT16) {
        std::vector<uint8_t> p;
        for (int v : values) put16(p, v);
        record(type, data_type, p);
    }

    void int32s(uint8_t type, const std::vector<int64_t>& values) {
        std::vector<uint8_t> p;
        p.reserve(values.size() * 4);
        for (int64_t v : values) {
            const auto u = static_cast<uint32_t>(static_cast<int32_t>(v));
            p.push_back(static_cast<uint8_t>(u >> 24));
            p.push_back(static_cast<uint8_t>(u >> 16));
            p.push_back(static_cast<uint8_t>(u >> 8));
            p.push_back(static_cast<uint8_t>(u));
        }
        record(type, INT32, p);
    }

    void reals(uint8_t type, std::initializer_list<double> values) {
        std::vector<uint8_t> p;
        for (double v : values) {
            const auto bytes = encode_real64(v);
            p.insert(p.end(), bytes.begin(), bytes.end());
        }
        record(type, REAL8, p);
    }

    void ascii(uint8_t type, const std::string& text) {
        std::vector<uint8_t> p(text.begin(), text.end());
        if (p.size() % 2 != 0) p.push_back(0);
        record(type, ASCII, p);
    }

    void timestamps(uint8_t type, const std::array<Timestamp, 2>& stamps) {
        std::vector<uint8_t> p;
        for (const auto& t : stamps)
            for (int16_t v : t) put16(p, v);
        record(type, INT16, p);
    }

    void xy(const std::vector<IntPoint>& points) {
        std::vector<int64_t> flat;
        flat.reserve(points.size() * 2);
        for (const auto& pt : points) {
            flat.push_back(pt.x);
            flat.push_back(pt.y);
        }
        int32s(XY, flat);
    }

    void strans(const Element& el) {
        const bool has_mag = el.magnification != 1.0;
        const bool has_angle = el.angle_degrees != 0.0;
        if (!el.reflect_x && !el.abs_magnification && !el.abs_angle && !has_mag && !has_angle) return;
        uint16_t bits = 0;
        if (el.reflect_x) bits |= STRANS_REFLECT;
        if (el.abs_magnification) bits |= STRANS_ABS_MAG;
        if (el.abs_angle) bits |= STRANS_ABS_ANGLE;
        int16s(STRANS, {bits}, BIT_ARRAY);
        if (has_mag) reals(MAG, {el.magnification});
        if (has_angle) reals(ANGLE, {el.angle_degrees});
    }

    void element(const Element& el) {
        switch (el.kind) {
            case ElementKind::boundary:
                empty(BOUNDARY);
                int16s(LAYER, {el.layer});
                int16s(DATATYPE, {el.datatype});
                xy(el.xy);
                break;
            case ElementKind::path:
                empty(PATH);
                int16s(LAYER, {el.layer});
                int16s(DATATYPE, {el.datatype});
                int16s(PATHTYPE, {el.pathtype});
                int32s(WIDTH, {el.width});
                xy(el.xy);
                break;
            case ElementKind::text:
                empty(TEXT);
                int16s(LAYER, {el.layer});
                int16s(TEXTTYPE, {el.datatype});
                if (el.presentation) int16s(PRESENTATION, {*el.presentation}, BIT_ARRAY);
                strans(el);
                xy(el.xy);
                ascii(STRING, el.text);
                break;
            case ElementKind::sref:
                empty(SREF);
                ascii(SNAME, el.ref_name);
                strans(el);
                xy(el.xy);
                break;
            case ElementKind::aref:
                empty(AREF);
                ascii(SNAME, el.ref_name);
                strans(el);
                int16s(COLROW, {el.columns, el.rows});
                xy(el.xy);
                break;
        }
        empty(ENDEL);
    }

    std::vector<uint8_t> take() { return std::move(out_); }

private:
    static void put16(std::vector<uint8_t>& p, int v) {
        const auto u = static_cast<uint16_t>(v);
        p.push_back(static_cast<uint8_t>(u >> 8));
        p.push_back(static_cast<uint8_t>(u & 0xff));
    }

    std::vector<uint8_t> out_;
};

}  // namespace

void validate(const Library& lib) {
    if (!(lib.meters_per_db_unit > 0) || !(lib.user_unit_per_db_unit > 0))
        invalid("units must be positive");
    std::set<std::string> names;
    for (const auto& s : lib.structures) {
        if (s.name.empty()) invalid("structure with an empty name");
        if (s.name.size() > kMaxStructureName)
            throw GdsError(GdsErrc::name_too_long, "structure name '" + s.name + "' exceeds 32 bytes");
        if (!names.insert(s.name).second) invalid("duplicate structure name '" + s.name + "'");
        for (std::size_t i = 0; i < s.elements.size(); ++i)
            validate_element(s.elements[i], "structure '" + s.name + "' element " + std::to_string(i));
    }
}

std::vector<uint8_t> write_gdsii(const Library& lib, const WriteOptions& options) {
    validate(lib);
    Writer w;
    const auto stamp = [&](const std::array<Timestamp, 2>& stored) {
        if (!options.clock) return stored;
        const Timestamp now = options.clock();
        return std::array<Timestamp, 2>{now, now};
    };
    w.int16s(HEADER, {600});
    w.timestamps(BGNLIB, stamp(lib.timestamps));
    w.ascii(LIBNAME, lib.name);
    w.reals(UNITS, {lib.user_unit_per_db_unit, lib.meters_per_db_unit});
    for (const auto& s : lib.structures) {
        w.timestamps(BGNSTR, stamp(s.timestamps));
        w.ascii(STRNAME, s.name);
        for (const auto& el : s.elements) w.element(el);
        w.empty(ENDSTR);
    }
    w.empty(ENDLIB);
    return w.take();
}

void write_gdsii_file(const Library& lib, const std::string& path, const WriteOptions& options) {
    const auto bytes = write_gdsii(lib, options);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace solomon::gds
