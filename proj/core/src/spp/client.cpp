#include "pcaad/spp/client.hpp"

#include "pcaad/errors.hpp"

namespace pcaad::spp {

SppClient::SppClient(TcpStream stream, int timeout_ms) : stream_(std::move(stream)) {
    stream_.set_recv_timeout(timeout_ms);
}

SppClient SppClient::connect(const std::string& target, int timeout_ms) {
    const auto [host, port] = split_host_port(target);
    return SppClient(TcpStream::connect(host, port, timeout_ms), timeout_ms);
}

Frame SppClient::roundtrip(Opcode op, const Bytes& payload) {
    Frame req;
    req.opcode = op;
    req.request_id = next_id_++;
    req.payload = payload;
    stream_.send_all(encode_frame(req));
    ++total_requests_;
    ++request_counts_[op];

    std::uint8_t header[kHeaderSize];
    stream_.recv_exact(header, kHeaderSize);
    if (header[0] != kMagic0 || header[1] != kMagic1)
        throw Error(ErrorCode::BadMagic, hex_dump({header, 2}));
    if (header[2] != kVersion) throw Error(ErrorCode::BadVersion, std::to_string(header[2]));
    const std::uint16_t payload_len = load_u16(header, 6);
    if (payload_len > kMaxPayload) throw Error(ErrorCode::OversizePayload, "response payload");

    Frame resp;
    resp.opcode = static_cast<Opcode>(header[3]);
    resp.request_id = load_u16(header, 4);
    resp.payload.resize(payload_len);
    if (payload_len) stream_.recv_exact(resp.payload.data(), payload_len);

    if (resp.opcode != response_for(op))
        throw Error(ErrorCode::ProtocolError, std::string("response opcode ") + opcode_name(resp.opcode));
    if (resp.request_id != req.request_id)
        throw Error(ErrorCode::ProtocolError, "request id mismatch: sent " +
                                                  std::to_string(req.request_id) + ", got " +
                                                  std::to_string(resp.request_id));
    return resp;
}

Frame SppClient::transact(Opcode op, const Bytes& payload) { return roundtrip(op, payload); }

Status SppClient::take_status(const Frame& resp) {
    if (resp.payload.empty()) throw Error(ErrorCode::ProtocolError, "response missing status byte");
    const auto status = static_cast<Status>(resp.payload[0]);
    switch (status) {
    case Status::Ok: return status;
    case Status::BlockNotFound: throw Error(ErrorCode::BlockNotFound, "remote status");
    case Status::OutOfRange: throw Error(ErrorCode::OutOfRange, "remote status");
    case Status::Malformed: throw Error(ErrorCode::Malformed, "remote status");
    case Status::Refused: throw Error(ErrorCode::Refused, "remote status");
    case Status::OversizePayload: throw Error(ErrorCode::OversizePayload, "remote status");
    }
    throw Error(ErrorCode::ProtocolError, "unknown status " + std::to_string(resp.payload[0]));
}

Bytes SppClient::read_bytes(std::uint16_t db, std::uint16_t offset, std::uint16_t count) {
    Bytes payload;
    append_u16(payload, db);
    append_u16(payload, offset);
    append_u16(payload, count);
    const Frame resp = roundtrip(Opcode::ReadReq, payload);
    take_status(resp);
    if (resp.payload.size() != 1u + count)
        throw Error(ErrorCode::ProtocolError, "read returned " + std::to_string(resp.payload.size() - 1) +
                                                  " bytes, wanted " + std::to_string(count));
    return Bytes(resp.payload.begin() + 1, resp.payload.end());
}

void SppClient::write_bytes(std::uint16_t db, std::uint16_t offset,
                            std::span<const std::uint8_t> data) {
    Bytes payload;
    append_u16(payload, db);
    append_u16(payload, offset);
    payload.insert(payload.end(), data.begin(), data.end());
    take_status(roundtrip(Opcode::WriteReq, payload));
}

BlockImage SppClient::upload_block(std::uint16_t db) {
    Bytes payload;
    append_u16(payload, db);
    const Frame resp = roundtrip(Opcode::UploadReq, payload);
    take_status(resp);
    return decode_block_image({resp.payload.data() + 1, resp.payload.size() - 1});
}

BlockMeta SppClient::get_block_info(std::uint16_t db) {
    Bytes payload;
    append_u16(payload, db);
    const Frame resp = roundtrip(Opcode::BlockInfoReq, payload);
    take_status(resp);
    return decode_block_meta({resp.payload.data() + 1, resp.payload.size() - 1});
}

std::vector<std::pair<BlockId, std::uint16_t>> SppClient::list_blocks() {
    const Frame resp = roundtrip(Opcode::ListBlocksReq, {});
    take_status(resp);
    const auto& p = resp.payload;
    if (p.size() < 3) throw Error(ErrorCode::ProtocolError, "list response truncated");
    const std::uint16_t count = load_u16(p, 1);
    if (p.size() != 3u + count * 5u)
        throw Error(ErrorCode::ProtocolError, "list response size mismatch");
    std::vector<std::pair<BlockId, std::uint16_t>> out;
    out.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        const std::size_t at = 3 + i * 5u;
        BlockId id;
        id.kind = static_cast<BlockClass>(p[at]);
        id.number = load_u16(p, at + 1);
        out.emplace_back(id, load_u16(p, at + 3));
    }
    return out;
}

} // namespace pcaad::spp
