#pragma once

#include "pcaad/spp/frame.hpp"
#include "pcaad/spp/net.hpp"
#include "pcaad/spp/wire_values.hpp"

#include <map>
#include <string>
#include <vector>

namespace pcaad::spp {

// Synchronous SPP client. Keeps a per-opcode request tally so callers can
// reason about their wire footprint.
class SppClient {
  public:
    explicit SppClient(TcpStream stream, int timeout_ms = 3000);
    // target is "host[:port]". Throws ConnectionFailed.
    static SppClient connect(const std::string& target, int timeout_ms = 3000);

    // Error statuses surface as Error with the matching code.
    Bytes read_bytes(std::uint16_t db, std::uint16_t offset, std::uint16_t count);
    void write_bytes(std::uint16_t db, std::uint16_t offset, std::span<const std::uint8_t> data);
    BlockImage upload_block(std::uint16_t db);
    BlockMeta get_block_info(std::uint16_t db);
    // (block id, body size) pairs, ascending by number.
    std::vector<std::pair<BlockId, std::uint16_t>> list_blocks();

    // Send any request and return the raw response frame (status unchecked).
    Frame transact(Opcode op, const Bytes& payload);

    std::uint64_t total_requests() const { return total_requests_; }
    const std::map<Opcode, std::uint64_t>& request_counts() const { return request_counts_; }

  private:
    Frame roundtrip(Opcode op, const Bytes& payload);
    static Status take_status(const Frame& resp);

    TcpStream stream_;
    std::uint16_t next_id_ = 1;
    std::uint64_t total_requests_ = 0;
    std::map<Opcode, std::uint64_t> request_counts_;
};

} // namespace pcaad::spp
