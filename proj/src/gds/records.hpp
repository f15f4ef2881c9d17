// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace solomon::gds::detail {

enum RecordType : uint8_t {
    HEADER = 0x00,
    BGNLIB = 0x01,
    LIBNAME = 0x02,
    UNITS = 0x03,
    ENDLIB = 0x04,
    BGNSTR = 0x05,
    STRNAME = 0x06,
    ENDSTR = 0x07,
    BOUNDARY = 0x08,
    PATH = 0x09,
    SREF = 0x0A,
    AREF = 0x0B,
    TEXT = 0x0C,
    LAYER = 0x0D,
    DATATYPE = 0x0E,
    WIDTH = 0x0F,
    XY = 0x10,
    ENDEL = 0x11,
    SNAME = 0x12,
    COLROW = 0x13,
    NODE = 0x15,
    TEXTTYPE = 0x16,
    PRESENTATION = 0x17,
    STRING = 0x19,
    STRANS = 0x1A,
    MAG = 0x1B,
    ANGLE = 0x1C,
    PATHTYPE = 0x21,
    BOX = 0x2D,
};

enum DataType : uint8_t {
    NO_DATA = 0,
    BIT_ARRAY = 1,
    INT16 = 2,
    INT32 = 3,
    REAL4 = 4,
    REAL8 = 5,
    ASCII = 6,
};

// Data type the standard prescribes for a supported record, or -1 when unsupported.
constexpr int expected_data_type(uint8_t record) {
    switch (record) {
        case HEADER: case BGNLIB: case BGNSTR: case LAYER: case DATATYPE: case COLROW:
        case TEXTTYPE: case PATHTYPE:
            return INT16;
        case WIDTH: case XY:
            return INT32;
        case UNITS: case MAG: case ANGLE:
            return REAL8;
        case LIBNAME: case STRNAME: case SNAME: case STRING:
            return ASCII;
        case PRESENTATION: case STRANS:
            return BIT_ARRAY;
        case ENDLIB: case ENDSTR: case BOUNDARY: case PATH: case SREF: case AREF: case TEXT:
        case ENDEL: case NODE: case BOX:
            return NO_DATA;
        default:
            return -1;
    }
}

constexpr uint16_t STRANS_REFLECT = 0x8000;
constexpr uint16_t STRANS_ABS_MAG = 0x0004;
constexpr uint16_t STRANS_ABS_ANGLE = 0x0002;

}  // namespace solomon::gds::detail
