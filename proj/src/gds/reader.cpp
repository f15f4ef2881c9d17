// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <iterator>

#include "records.hpp"
#include "solomon/gds/gds.hpp"

namespace solomon::gds {

namespace {

using namespace detail;

std::string hex_byte(uint8_t value) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%02X", value);
    return buf;
}

struct Record {
    uint8_t type = 0;
    uint8_t data_type = 0;
    std::span<const uint8_t> payload;
    std::size_t offset = 0;

    int16_t int16_at(std::size_t i) const {
        return static_cast<int16_t>((payload[2 * i] << 8) | payload[2 * i + 1]);
    }
    int32_t int32_at(std::size_t i) const {
        const auto* p = &payload[4 * i];
        return static_cast<int32_t>((uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) |
                                    (uint32_t{p[2]} << 8) | uint32_t{p[3]});
    }
    double real8_at(std::size_t i) const { return decode_real64(payload.subspan(8 * i).first<8>()); }
    std::size_t count16() const { return payload.size() / 2; }
    std::size_t count32() const { return payload.size() / 4; }
    std::size_t count64() const { return payload.size() / 8; }
    std::string ascii() const {
        std::string s(payload.begin(), payload.end());
        while (!s.empty() && s.back() == '\0') s.pop_back();
        return s;
    }
    uint16_t bits() const { return static_cast<uint16_t>(int16_at(0)); }
};

[[noreturn]] void malformed(const Record& rec, const std::string& why) {
    throw GdsError(GdsErrc::malformed_record,
                   "record " + hex_byte(rec.type) + " at offset " + std::to_string(rec.offset) + ": " + why);
}

class RecordStream {
public:
    explicit RecordStream(std::span<const uint8_t> bytes) : bytes_(bytes) {}

    bool at_end() const { return pos_ >= bytes_.size(); }

    Record next() {
        if (bytes_.size() - pos_ < 4)
            throw GdsError(GdsErrc::truncated_stream,
                           "stream ends inside a record header at offset " + std::to_string(pos_));
        const std::size_t length = (std::size_t{bytes_[pos_]} << 8) | bytes_[pos_ + 1];
        Record rec;
        rec.type = bytes_[pos_ + 2];
        rec.data_type = bytes_[pos_ + 3];
        rec.offset = pos_;
        if (length < 4 || length % 2 != 0) malformed(rec, "invalid record length " + std::to_string(length));
        if (length > bytes_.size() - pos_)
            throw GdsError(GdsErrc::truncated_stream, "record at offset " + std::to_string(pos_) + " declares " +
                                                          std::to_string(length) + " bytes, " +
                                                          std::to_string(bytes_.size() - pos_) + " remain");
        rec.payload = bytes_.subspan(pos_ + 4, length - 4);
        pos_ += length;
        return rec;
    }

private:
    std::span<const uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void check_shape(const Record& rec) {
    const int expected = expected_data_type(rec.type);
    if (expected < 0) return;
    if (rec.data_type != expected)
        malformed(rec, "data type " + std::to_string(rec.data_type) + " where " + std::to_string(expected) +
                           " is required");
    const std::size_t n = rec.payload.size();
    switch (expected) {
        case NO_DATA:
            if (n != 0) malformed(rec, "unexpected payload");
            break;
        case INT16:
        case BIT_ARRAY:
            if (n < 2 || n % 2 != 0) malformed(rec, "payload is not a sequence of 2-byte words");
            break;
        case INT32:
            if (n < 4 || n % 4 != 0) malformed(rec, "payload is not a sequence of 4-byte integers");
            break;
        case REAL8:
            if (n < 8 || n % 8 != 0) malformed(rec, "payload is not a sequence of 8-byte reals");
            break;
        default:
            break;
    }
}

std::array<Timestamp, 2> read_timestamps(const Record& rec) {
    if (rec.count16() < 12) malformed(rec, "expected 12 timestamp words");
    std::array<Timestamp, 2> stamps{};
    for (std::size_t i = 0; i < 12; ++i) stamps[i / 6][i % 6] = rec.int16_at(i);
    return stamps;
}

ElementKind kind_for(uint8_t record) {
    switch (record) {
        case PATH: return ElementKind::path;
        case TEXT: return ElementKind::text;
        case SREF: return ElementKind::sref;
        case AREF: return ElementKind::aref;
        default: return ElementKind::boundary;
    }
}

void finish_element(Element& el, Library& lib, const std::string& where) {
    switch (el.kind) {
        case ElementKind::boundary:
            if (!el.xy.empty() && !(el.xy.front() == el.xy.back())) {
                el.xy.push_back(el.xy.front());
                lib.warnings.push_back(where + ": boundary ring was not closed; closing point appended");
            }
            if (el.xy.size() < 4) lib.warnings.push_back(where + ": boundary has fewer than 4 points");
            break;
        case ElementKind::path:
            if (el.xy.size() < 2) lib.warnings.push_back(where + ": path has fewer than 2 points");
            if (el.pathtype != 0 && el.pathtype != 1 && el.pathtype != 2)
                lib.warnings.push_back(where + ": pathtype " + std::to_string(el.pathtype) +
                                       " unsupported, treated as flush");
            break;
        case ElementKind::aref:
            if (el.xy.size() != 3)
                throw GdsError(GdsErrc::malformed_record, where + ": AREF requires exactly 3 XY points");
            if (el.columns < 1 || el.rows < 1)
                throw GdsError(GdsErrc::malformed_record, where + ": AREF requires columns, rows >= 1");
            break;
        case ElementKind::sref:
        case ElementKind::text:
            if (el.xy.size() != 1)
                throw GdsError(GdsErrc::malformed_record, where + ": " + to_string(el.kind) +
                                                              " requires exactly 1 XY point");
            break;
    }
}

}  // namespace

Library parse_gdsii(std::span<const uint8_t> bytes) {
    Library lib;
    lib.name.clear();
    RecordStream stream(bytes);

    bool have_header = false;
    bool have_units = false;
    bool ended = false;
    Structure* current = nullptr;
    std::optional<Element> element;
    bool skipping_element = false;  // inside an unsupported element (NODE, BOX)

    while (!stream.at_end() && !ended) {
        const Record rec = stream.next();
        const int expected = expected_data_type(rec.type);
        if (expected < 0) {
            lib.warnings.push_back("skipped unsupported record " + hex_byte(rec.type) + " at offset " +
                                   std::to_string(rec.offset));
            continue;
        }
        if (skipping_element) {
            if (rec.type == ENDEL) skipping_element = false;
            continue;
        }
        check_shape(rec);

        if (element) {
            Element& el = *element;
            switch (rec.type) {
                case LAYER: el.layer = rec.int16_at(0); break;
                case DATATYPE:
                case TEXTTYPE: el.datatype = rec.int16_at(0); break;
                case WIDTH:
                    if (el.kind == ElementKind::path) el.width = rec.int32_at(0);
                    break;
                case PATHTYPE:
                    if (el.kind == ElementKind::path) el.pathtype = rec.int16_at(0);
                    break;
                case PRESENTATION: el.presentation = rec.bits(); break;
                case STRING: el.text = rec.ascii(); break;
                case SNAME: el.ref_name = rec.ascii(); break;
                case STRANS: {
                    const uint16_t bits = rec.bits();
                    el.reflect_x = (bits & STRANS_REFLECT) != 0;
                    el.abs_magnification = (bits & STRANS_ABS_MAG) != 0;
                    el.abs_angle = (bits & STRANS_ABS_ANGLE) != 0;
                    break;
                }
                case MAG: el.magnification = rec.real8_at(0); break;
                case ANGLE: el.angle_degrees = rec.real8_at(0); break;
                case COLROW:
                    if (rec.count16() < 2) malformed(rec, "COLROW requires 2 values");
                    el.columns = rec.int16_at(0);
                    el.rows = rec.int16_at(1);
                    break;
                case XY: {
                    const std::size_t n = rec.count32();
                    if (n % 2 != 0) malformed(rec, "odd number of XY coordinates");
                    el.xy.clear();
                    el.xy.reserve(n / 2);
                    for (std::size_t i = 0; i < n; i += 2) el.xy.push_back({rec.int32_at(i), rec.int32_at(i + 1)});
                    break;
                }
                case ENDEL: {
                    const std::string where = "structure '" + current->name + "' element " +
                                              std::to_string(current->elements.size());
                    finish_element(el, lib, where);
                    current->elements.push_back(std::move(el));
                    element.reset();
                    break;
                }
                default: malformed(rec, "record not allowed inside an element");
            }
            continue;
        }

        switch (rec.type) {
            case HEADER: have_header = true; break;
            case BGNLIB: lib.timestamps = read_timestamps(rec); break;
            case LIBNAME: lib.name = rec.ascii(); break;
            case UNITS:
                if (rec.count64() < 2) malformed(rec, "UNITS requires 2 reals");
                lib.user_unit_per_db_unit = rec.real8_at(0);
                lib.meters_per_db_unit = rec.real8_at(1);
                have_units = true;
                break;
            case ENDLIB:
                if (current) malformed(rec, "ENDLIB inside a structure");
                ended = true;
                break;
            case BGNSTR:
                if (!have_units) throw GdsError(GdsErrc::missing_units, "structure begins before any UNITS record");
                if (current) malformed(rec, "nested BGNSTR");
                lib.structures.emplace_back();
                current = &lib.structures.back();
                current->timestamps = read_timestamps(rec);
                break;
            case STRNAME:
                if (!current) malformed(rec, "STRNAME outside a structure");
                current->name = rec.ascii();
                break;
            case ENDSTR:
                if (!current) malformed(rec, "ENDSTR outside a structure");
                current = nullptr;
                break;
            case BOUNDARY:
            case PATH:
            case TEXT:
            case SREF:
            case AREF:
                if (!current) malformed(rec, "element outside a structure");
                element.emplace();
                element->kind = kind_for(rec.type);
                break;
            case NODE:
            case BOX:
                if (!current) malformed(rec, "element outside a structure");
                lib.warnings.push_back("skipped unsupported element " + hex_byte(rec.type) + " at offset " +
                                       std::to_string(rec.offset));
                skipping_element = true;
                break;
            default: malformed(rec, "record not allowed outside an element");
        }
    }

    if (!ended) throw GdsError(GdsErrc::truncated_stream, "stream ends before ENDLIB");
    if (!have_header) lib.warnings.push_back("missing HEADER record");
    if (!have_units) throw GdsError(GdsErrc::missing_units, "library has no UNITS record");
    return lib;
}

Library read_gdsii_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_gdsii(bytes);
}

}  // namespace solomon::gds
