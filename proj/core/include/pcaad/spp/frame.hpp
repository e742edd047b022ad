#pragma once

#include "pcaad/bytes.hpp"

#include <cstdint>
#include <span>

// SPP wire format. Fixed 8-byte header, big-endian integers:
//
//   0: 0x53 'S'
//   1: 0x50 'P'
//   2: version, 0x01
//   3: opcode
//   4: request_id (u16)
//   6: payload_len (u16, <= 4096)
//   8: payload
//
// A response echoes the request opcode with the high bit set and the same
// request_id; its payload begins with a status byte.

namespace pcaad::spp {

inline constexpr std::uint8_t kMagic0 = 0x53;
inline constexpr std::uint8_t kMagic1 = 0x50;
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 8;
inline constexpr std::size_t kMaxPayload = 4096;
inline constexpr std::uint16_t kDefaultPort = 10102;
inline constexpr std::uint8_t kResponseFlag = 0x80;

enum class Opcode : std::uint8_t {
    ReadReq = 0x01,
    WriteReq = 0x02,
    UploadReq = 0x03,
    BlockInfoReq = 0x04,
    ListBlocksReq = 0x05,
    ReadResp = 0x81,
    WriteResp = 0x82,
    UploadResp = 0x83,
    BlockInfoResp = 0x84,
    ListBlocksResp = 0x85,
};

enum class Status : std::uint8_t {
    Ok = 0x00,
    BlockNotFound = 0x01,
    OutOfRange = 0x02,
    Malformed = 0x03,
    Refused = 0x04,
    OversizePayload = 0x05, // requested data cannot fit one response frame
};

const char* opcode_name(Opcode op); // unknown values render as "op_0xNN"
const char* status_name(Status s);

inline bool is_response(Opcode op) { return static_cast<std::uint8_t>(op) & kResponseFlag; }
inline Opcode response_for(Opcode req) {
    return static_cast<Opcode>(static_cast<std::uint8_t>(req) | kResponseFlag);
}

struct Frame {
    Opcode opcode = Opcode::ReadReq;
    std::uint16_t request_id = 0;
    Bytes payload;

    bool operator==(const Frame&) const = default;
};

// Throws OversizePayload when payload > 4096.
Bytes encode_frame(const Frame& f);

// Strict: throws BadMagic / BadVersion / TruncatedFrame / OversizePayload /
// TrailingBytes. Unknown opcodes decode fine; rejecting them is the server's
// call.
Frame decode_frame(std::span<const std::uint8_t> bytes);

} // namespace pcaad::spp
