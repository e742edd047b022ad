#pragma once

#include "pcaad/softplc/plc.hpp"
#include "pcaad/spp/frame.hpp"
#include "pcaad/spp/net.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pcaad::softplc {

// One line per serviced request.
struct RequestEvent {
    std::int64_t t_us = 0;      // since server start
    std::uint64_t conn = 0;     // connection ordinal
    std::uint8_t opcode = 0;
    std::uint16_t db = 0;
    std::uint32_t offset = 0;
    std::uint32_t size = 0;
    std::uint8_t status = 0;
};

class EventLog {
  public:
    void append(const RequestEvent& e);
    std::vector<RequestEvent> snapshot() const;
    std::size_t size() const;
    // One JSON object per line.
    std::string to_jsonl() const;

  private:
    mutable std::mutex mu_;
    std::vector<RequestEvent> events_;
};

// TCP front end plus cycle thread around a Plc.
class SppServer {
  public:
    explicit SppServer(PlcConfig cfg);
    ~SppServer();

    SppServer(const SppServer&) = delete;
    SppServer& operator=(const SppServer&) = delete;

    void start(); // throws ConnectionFailed on bind errors
    void stop();

    std::uint16_t port() const { return port_; }
    std::string endpoint() const; // "host:port"
    Plc& plc() { return *plc_; }
    const EventLog& event_log() const { return log_; }

  private:
    void accept_loop();
    void serve_connection(spp::TcpStream stream, std::uint64_t conn_id);
    void cycle_loop();
    spp::Frame handle_request(const spp::Frame& req, std::uint64_t conn_id);

    PlcConfig cfg_;
    std::unique_ptr<Plc> plc_;
    EventLog log_;
    spp::TcpListener listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stop_{false};
    std::atomic<std::uint64_t> next_conn_{1};
    std::thread accept_thread_;
    std::thread cycle_thread_;
    std::mutex conn_mu_;
    std::vector<std::thread> conn_threads_;
    std::chrono::steady_clock::time_point started_;
};

} // namespace pcaad::softplc
