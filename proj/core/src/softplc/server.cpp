#include "pcaad/softplc/server.hpp"

#include "pcaad/errors.hpp"

#include <chrono>
#include <sstream>

namespace pcaad::softplc {

using namespace std::chrono;

void EventLog::append(const RequestEvent& e) {
    std::lock_guard lock(mu_);
    events_.push_back(e);
}

std::vector<RequestEvent> EventLog::snapshot() const {
    std::lock_guard lock(mu_);
    return events_;
}

std::size_t EventLog::size() const {
    std::lock_guard lock(mu_);
    return events_.size();
}

std::string EventLog::to_jsonl() const {
    std::ostringstream out;
    for (const auto& e : snapshot()) {
        out << "{\"t_us\":" << e.t_us << ",\"conn\":" << e.conn << ",\"opcode\":\""
            << spp::opcode_name(static_cast<spp::Opcode>(e.opcode)) << "\",\"db\":" << e.db
            << ",\"offset\":" << e.offset << ",\"size\":" << e.size << ",\"status\":\""
            << spp::status_name(static_cast<spp::Status>(e.status)) << "\"}\n";
    }
    return out.str();
}

namespace {

std::uint8_t status_byte_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::BlockNotFound: return static_cast<std::uint8_t>(spp::Status::BlockNotFound);
    case ErrorCode::OutOfRange: return static_cast<std::uint8_t>(spp::Status::OutOfRange);
    case ErrorCode::Refused: return static_cast<std::uint8_t>(spp::Status::Refused);
    case ErrorCode::OversizePayload:
        return static_cast<std::uint8_t>(spp::Status::OversizePayload);
    default: return static_cast<std::uint8_t>(spp::Status::Malformed);
    }
}

} // namespace

SppServer::SppServer(PlcConfig cfg) : cfg_(std::move(cfg)), plc_(std::make_unique<Plc>(cfg_)) {}

SppServer::~SppServer() { stop(); }

void SppServer::start() {
    listener_ = spp::TcpListener::bind(cfg_.listen_host, cfg_.listen_port);
    port_ = listener_.port();
    started_ = steady_clock::now();
    stop_.store(false);
    accept_thread_ = std::thread([this] { accept_loop(); });
    cycle_thread_ = std::thread([this] { cycle_loop(); });
}

void SppServer::stop() {
    if (stop_.exchange(true)) {
        if (accept_thread_.joinable()) accept_thread_.join();
        if (cycle_thread_.joinable()) cycle_thread_.join();
        return;
    }
    listener_.close();
    if (accept_thread_.joinable()) accept_thread_.join();
    if (cycle_thread_.joinable()) cycle_thread_.join();
    std::vector<std::thread> conns;
    {
        std::lock_guard lock(conn_mu_);
        conns.swap(conn_threads_);
    }
    for (auto& t : conns)
        if (t.joinable()) t.join();
}

std::string SppServer::endpoint() const {
    return cfg_.listen_host + ":" + std::to_string(port_);
}

void SppServer::accept_loop() {
    while (!stop_.load()) {
        spp::TcpStream conn = listener_.accept(50);
        if (!conn.valid()) continue;
        const std::uint64_t id = next_conn_.fetch_add(1);
        std::lock_guard lock(conn_mu_);
        conn_threads_.emplace_back(
            [this, id](spp::TcpStream s) { serve_connection(std::move(s), id); },
            std::move(conn));
    }
}

void SppServer::cycle_loop() {
    const auto period = milliseconds(cfg_.cycle_time_ms);
    auto next = steady_clock::now() + period;
    while (!stop_.load()) {
        plc_->execute_cycle();
        std::this_thread::sleep_until(next);
        next += period;
    }
}

void SppServer::serve_connection(spp::TcpStream stream, std::uint64_t conn_id) {
    Bytes buf(spp::kHeaderSize);
    stream.set_recv_timeout(200);
    while (!stop_.load()) {
        try {
            stream.recv_exact(buf.data(), 1); // poll for the next frame
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Timeout) continue;
            return;
        }
        try {
            stream.set_recv_timeout(2000); // mid-frame stalls end the session
            stream.recv_exact(buf.data() + 1, spp::kHeaderSize - 1);
            if (buf[0] != spp::kMagic0 || buf[1] != spp::kMagic1 || buf[2] != spp::kVersion)
                return; // framing is gone, drop the connection
            const std::uint16_t payload_len = load_u16(buf, 6);
            if (payload_len > spp::kMaxPayload) {
                spp::Frame resp;
                resp.opcode = static_cast<spp::Opcode>(buf[3] | spp::kResponseFlag);
                resp.request_id = load_u16(buf, 4);
                resp.payload = {static_cast<std::uint8_t>(spp::Status::OversizePayload)};
                stream.send_all(encode_frame(resp));
                return;
            }
            buf.resize(spp::kHeaderSize + payload_len);
            if (payload_len) stream.recv_exact(buf.data() + spp::kHeaderSize, payload_len);
            const spp::Frame req = spp::decode_frame(buf);
            buf.resize(spp::kHeaderSize);
            const spp::Frame resp = handle_request(req, conn_id);
            stream.send_all(encode_frame(resp));
            stream.set_recv_timeout(200);
        } catch (const Error&) {
            return;
        }
    }
}

spp::Frame SppServer::handle_request(const spp::Frame& req, std::uint64_t conn_id) {
    RequestEvent ev;
    ev.t_us = duration_cast<microseconds>(steady_clock::now() - started_).count();
    ev.conn = conn_id;
    ev.opcode = static_cast<std::uint8_t>(req.opcode);

    spp::Frame resp;
    resp.opcode = static_cast<spp::Opcode>(static_cast<std::uint8_t>(req.opcode) |
                                           spp::kResponseFlag);
    resp.request_id = req.request_id;

    const Bytes& p = req.payload;
    Bytes body;
    std::uint8_t status = static_cast<std::uint8_t>(spp::Status::Ok);
    try {
        switch (req.opcode) {
        case spp::Opcode::ReadReq: {
            if (p.size() != 6) throw Error(ErrorCode::Malformed, "read payload must be 6 bytes");
            const std::uint16_t db = load_u16(p, 0);
            const std::uint16_t offset = load_u16(p, 2);
            const std::uint16_t count = load_u16(p, 4);
            ev.db = db;
            ev.offset = offset;
            ev.size = count;
            if (count == 0) throw Error(ErrorCode::Malformed, "zero-length read");
            if (count + 1u > spp::kMaxPayload)
                throw Error(ErrorCode::OversizePayload, "read response would not fit");
            body = plc_->read(db, offset, count);
            break;
        }
        case spp::Opcode::WriteReq: {
            if (!cfg_.features.writes_enabled) throw Error(ErrorCode::Refused, "writes disabled");
            if (p.size() < 5) throw Error(ErrorCode::Malformed, "write payload too short");
            const std::uint16_t db = load_u16(p, 0);
            const std::uint16_t offset = load_u16(p, 2);
            ev.db = db;
            ev.offset = offset;
            ev.size = static_cast<std::uint32_t>(p.size() - 4);
            plc_->write(db, offset, {p.data() + 4, p.size() - 4});
            break;
        }
        case spp::Opcode::UploadReq: {
            if (!cfg_.features.uploads_enabled)
                throw Error(ErrorCode::Refused, "uploads disabled");
            if (p.size() != 2) throw Error(ErrorCode::Malformed, "upload payload must be 2 bytes");
            const std::uint16_t db = load_u16(p, 0);
            ev.db = db;
            body = spp::encode_block_image(plc_->upload(db));
            ev.size = static_cast<std::uint32_t>(body.size());
            break;
        }
        case spp::Opcode::BlockInfoReq: {
            if (!cfg_.features.block_info_enabled)
                throw Error(ErrorCode::Refused, "block info disabled");
            if (p.size() != 2)
                throw Error(ErrorCode::Malformed, "block info payload must be 2 bytes");
            const std::uint16_t db = load_u16(p, 0);
            ev.db = db;
            body = spp::encode_block_meta(plc_->block_info(db));
            break;
        }
        case spp::Opcode::ListBlocksReq: {
            if (!cfg_.features.block_info_enabled)
                throw Error(ErrorCode::Refused, "block info disabled");
            if (!p.empty()) throw Error(ErrorCode::Malformed, "list payload must be empty");
            const auto blocks = plc_->list_blocks();
            append_u16(body, static_cast<std::uint16_t>(blocks.size()));
            for (const auto& [id, size] : blocks) {
                body.push_back(static_cast<std::uint8_t>(id.kind));
                append_u16(body, id.number);
                append_u16(body, size);
            }
            ev.size = static_cast<std::uint32_t>(blocks.size());
            break;
        }
        default: throw Error(ErrorCode::Malformed, "unknown opcode");
        }
    } catch (const Error& e) {
        status = status_byte_for(e.code());
        body.clear();
    }

    resp.payload.reserve(1 + body.size());
    resp.payload.push_back(status);
    resp.payload.insert(resp.payload.end(), body.begin(), body.end());
    ev.status = status;
    log_.append(ev);
    return resp;
}

} // namespace pcaad::softplc
