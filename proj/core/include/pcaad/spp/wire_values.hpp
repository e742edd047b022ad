#pragma once

#include "pcaad/bytes.hpp"
#include "pcaad/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>

// Value encodings shared by data blocks and the wire: area pointers, PLC
// strings, block images, and per-element field codecs.

namespace pcaad::spp {

// 6-byte pointer: db (u16), area byte 0x84 (data block area), 24-bit bit
// address. byte offset = bit_address / 8.
inline constexpr std::uint8_t kAreaDb = 0x84;
inline constexpr std::size_t kIndirectSize = 6;

struct IndirectAddress {
    std::uint16_t db = 0;
    std::uint32_t bit_address = 0; // 24 bit

    std::uint32_t byte_offset() const { return bit_address >> 3; }
    std::uint8_t bit() const { return bit_address & 7; }

    static IndirectAddress to(std::uint16_t db, std::uint32_t byte_offset, std::uint8_t bit = 0);

    bool operator==(const IndirectAddress&) const = default;
};

Bytes encode_indirect(const IndirectAddress& a);
// Exactly 6 bytes. Throws TruncatedFrame / TrailingBytes / BadArea.
IndirectAddress decode_indirect(std::span<const std::uint8_t> bytes);

// PLC string: [capacity][current length][chars...]. A standard STRING
// occupies 256 bytes (capacity 254).
Bytes encode_plc_string(const std::string& text, std::uint8_t capacity = 254);
// Throws LengthFieldInvalid (short buffer or cur > max) / NonAscii.
std::string decode_plc_string(std::span<const std::uint8_t> bytes);

// CRC-16/CCITT-FALSE: poly 0x1021, init 0xffff, no reflection, xorout 0.
std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes);

// Block image: 36-byte header followed by the body.
//
//    0: block_class (u8)
//    1: block_number (u16)
//    3: family (8 bytes, ASCII, space padded)
//   11: header_name (8 bytes)
//   19: author (8 bytes)
//   27: version major, minor (2 bytes)
//   29: reserved (3 bytes, zero)
//   32: body_length (u16)
//   34: crc (u16) over header[0..34) + body
inline constexpr std::size_t kImageHeaderSize = 36;

struct BlockImage {
    BlockMeta meta; // associated_fb is not part of the image
    std::string author;
    Bytes body;

    bool operator==(const BlockImage&) const = default;
};

Bytes encode_block_image(const BlockImage& image);
// Throws TruncatedFrame / TrailingBytes / CrcMismatch / LengthFieldInvalid.
BlockImage decode_block_image(std::span<const std::uint8_t> bytes);

// BlockInfo response body (after the status byte):
//   class u8, number u16, family 8B, header 8B, version 2B, body_length u16,
//   assoc flag u8 [, class u8, number u16]
Bytes encode_block_meta(const BlockMeta& meta);
BlockMeta decode_block_meta(std::span<const std::uint8_t> bytes);

// Field codecs. Non-BOOL fields occupy whole bytes at their placement;
// BOOLs are handled by the caller via read-modify-write on the byte.
using FieldValue = std::variant<bool, std::int64_t, double, std::string, IndirectAddress>;

// Encode a typed literal as field bytes (BOOL not supported here).
Bytes encode_field_literal(const ElemType& elem, const Literal& value);
// Decode field bytes; `bit` selects the BOOL bit within the byte.
FieldValue decode_field_bytes(const ElemType& elem, std::span<const std::uint8_t> bytes,
                              std::uint8_t bit = 0);
std::string field_value_to_string(const FieldValue& v);

} // namespace pcaad::spp
