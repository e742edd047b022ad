#include "pcaad/spp/frame.hpp"

#include "pcaad/errors.hpp"

namespace pcaad::spp {

const char* opcode_name(Opcode op) {
    switch (op) {
    case Opcode::ReadReq: return "ReadReq";
    case Opcode::WriteReq: return "WriteReq";
    case Opcode::UploadReq: return "UploadReq";
    case Opcode::BlockInfoReq: return "BlockInfoReq";
    case Opcode::ListBlocksReq: return "ListBlocksReq";
    case Opcode::ReadResp: return "ReadResp";
    case Opcode::WriteResp: return "WriteResp";
    case Opcode::UploadResp: return "UploadResp";
    case Opcode::BlockInfoResp: return "BlockInfoResp";
    case Opcode::ListBlocksResp: return "ListBlocksResp";
    }
    return "op_unknown";
}

const char* status_name(Status s) {
    switch (s) {
    case Status::Ok: return "Ok";
    case Status::BlockNotFound: return "BlockNotFound";
    case Status::OutOfRange: return "OutOfRange";
    case Status::Malformed: return "Malformed";
    case Status::Refused: return "Refused";
    case Status::OversizePayload: return "OversizePayload";
    }
    return "status_unknown";
}

Bytes encode_frame(const Frame& f) {
    if (f.payload.size() > kMaxPayload)
        throw Error(ErrorCode::OversizePayload,
                    "payload " + std::to_string(f.payload.size()) + " > " + std::to_string(kMaxPayload));
    Bytes out;
    out.reserve(kHeaderSize + f.payload.size());
    out.push_back(kMagic0);
    out.push_back(kMagic1);
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(f.opcode));
    append_u16(out, f.request_id);
    append_u16(out, static_cast<std::uint16_t>(f.payload.size()));
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize)
        throw Error(ErrorCode::TruncatedFrame, "header needs 8 bytes, got " + std::to_string(bytes.size()));
    if (bytes[0] != kMagic0 || bytes[1] != kMagic1)
        throw Error(ErrorCode::BadMagic, hex_dump(bytes.subspan(0, 2)));
    if (bytes[2] != kVersion)
        throw Error(ErrorCode::BadVersion, "version " + std::to_string(bytes[2]));

    const std::uint16_t payload_len = load_u16(bytes, 6);
    if (payload_len > kMaxPayload)
        throw Error(ErrorCode::OversizePayload, "declared payload " + std::to_string(payload_len));
    if (bytes.size() < kHeaderSize + payload_len)
        throw Error(ErrorCode::TruncatedFrame, "expected " + std::to_string(kHeaderSize + payload_len) +
                                                   " bytes, got " + std::to_string(bytes.size()));
    if (bytes.size() > kHeaderSize + payload_len)
        throw Error(ErrorCode::TrailingBytes,
                    std::to_string(bytes.size() - kHeaderSize - payload_len) + " bytes after payload");

    Frame f;
    f.opcode = static_cast<Opcode>(bytes[3]);
    f.request_id = load_u16(bytes, 4);
    f.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
    return f;
}

} // namespace pcaad::spp
