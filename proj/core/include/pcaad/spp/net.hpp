#pragma once

#include "pcaad/bytes.hpp"

#include <cstdint>
#include <span>
#include <string>

// Thin RAII wrappers over POSIX sockets; enough for one framed protocol.

namespace pcaad::spp {

class TcpStream {
  public:
    TcpStream() = default;
    explicit TcpStream(int fd) : fd_(fd) {}
    TcpStream(TcpStream&& other) noexcept;
    TcpStream& operator=(TcpStream&& other) noexcept;
    TcpStream(const TcpStream&) = delete;
    TcpStream& operator=(const TcpStream&) = delete;
    ~TcpStream();

    // host may be a name or dotted quad. Throws ConnectionFailed.
    static TcpStream connect(const std::string& host, std::uint16_t port, int timeout_ms = 3000);

    void set_recv_timeout(int timeout_ms);
    void send_all(std::span<const std::uint8_t> data); // ConnectionFailed on error
    // Throws Timeout on recv timeout, ConnectionFailed on EOF/error.
    void recv_exact(std::uint8_t* dst, std::size_t n);

    bool valid() const { return fd_ >= 0; }
    void close();

  private:
    int fd_ = -1;
};

class TcpListener {
  public:
    TcpListener() = default;
    TcpListener(TcpListener&& other) noexcept;
    TcpListener& operator=(TcpListener&& other) noexcept;
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    ~TcpListener();

    // port 0 binds an ephemeral port; port() reports the real one.
    static TcpListener bind(const std::string& host, std::uint16_t port);

    std::uint16_t port() const { return port_; }
    // Returns an invalid stream on timeout or when the listener was closed.
    TcpStream accept(int timeout_ms);
    void close();
    bool valid() const { return fd_ >= 0; }

  private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// "host:port" with optional port (default 10102).
std::pair<std::string, std::uint16_t> split_host_port(const std::string& target);

} // namespace pcaad::spp
