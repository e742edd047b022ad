#pragma once

// Shared plumbing: in-process server on an ephemeral port, canned configs,
// the allocation coverage oracle, and a runner for the installed CLI binary.

#include "pcaad/layout.hpp"
#include "pcaad/softplc/server.hpp"
#include "pcaad/spp/client.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace pcaad::test {

// Mirrors configs/demo-small.json, inlined so unit tests do not depend on
// the file tree. Port 0 = ephemeral.
inline const char* kSmallDemoConfig = R"({
  "listen": "127.0.0.1:0",
  "cycle_time_ms": 10,
  "global_dbs": [
    {
      "db": 1,
      "size": 552,
      "init": [
        { "offset": 40, "type": "STRING", "value": "test@test.com" },
        { "offset": 296, "type": "STRING", "value": "mypassword" }
      ]
    }
  ],
  "fb_instances": [
    {
      "fb": "MODBUS_COMM_LOAD",
      "db": 5,
      "bindings": [ { "field": "RTS_OFF_DLY", "global": "DB1.DBW0" } ]
    },
    {
      "fb": "IEC_CU",
      "db": 7,
      "bindings": [
        { "field": "CU", "global": "DB1.DBX2.0" },
        { "field": "R", "global": "DB1.DBX2.1" },
        { "field": "PV", "constant": 1000 }
      ]
    },
    {
      "fb": "AS_MAIL",
      "db": 8,
      "bindings": [
        { "field": "USERNAME", "constant": "DB1.DBX40.0" },
        { "field": "PASSWORD", "constant": "DB1.DBX296.0" }
      ]
    }
  ]
})";

inline const char* kCovertDemoConfig = R"({
  "listen": "127.0.0.1:0",
  "cycle_time_ms": 10,
  "global_dbs": [ { "db": 1, "size": 2 } ],
  "fb_instances": [
    {
      "fb": "IEC_CU",
      "db": 3,
      "bindings": [
        { "field": "CU", "global": "DB1.DBX0.0" },
        { "field": "PV", "constant": 50 }
      ]
    }
  ]
})";

class LivePlc {
  public:
    explicit LivePlc(const std::string& config_json) {
        auto cfg = softplc::config_from_json(config_json, ".");
        cfg.listen_port = 0;
        server = std::make_unique<softplc::SppServer>(std::move(cfg));
        server->start();
    }
    ~LivePlc() { server->stop(); }

    spp::SppClient connect(int timeout_ms = 3000) {
        return spp::SppClient::connect(server->endpoint(), timeout_ms);
    }

    std::unique_ptr<softplc::SppServer> server;
};

// Independent coverage check: every bit of the block is owned by exactly one
// placement or sits in the null map, and the two never overlap. Deliberately
// set-based rather than cursor-based so it cannot share a bug with the
// allocator it is checking.
inline void check_bit_coverage(const DbLayout& layout) {
    ASSERT_GT(layout.total_size, 0);
    ASSERT_EQ(layout.total_size % 2, 0) << layout.fb_name << ": blocks end on a 16-bit boundary";

    const std::size_t nbits = std::size_t{layout.total_size} * 8;
    std::vector<int> owner(nbits, -1);

    for (std::size_t i = 0; i < layout.placements.size(); ++i) {
        const Placement& p = layout.placements[i];
        std::vector<std::size_t> bits;
        if (p.elem.kind == Elem::Bool) {
            ASSERT_LE(p.bit, 7) << layout.fb_name << "." << p.field;
            bits.push_back(std::size_t{p.byte_offset} * 8 + p.bit);
        } else {
            EXPECT_EQ(p.byte_offset % 2, 0u)
                << layout.fb_name << "." << p.field << ": non-BOOL fields start on even bytes";
            EXPECT_EQ(p.bit, 0) << layout.fb_name << "." << p.field;
            const unsigned bytes = width_bits(p.elem) / 8;
            for (unsigned b = 0; b < bytes * 8; ++b)
                bits.push_back(std::size_t{p.byte_offset} * 8 + b);
        }
        for (std::size_t bitpos : bits) {
            ASSERT_LT(bitpos, nbits) << layout.fb_name << "." << p.field << " spills past the block";
            ASSERT_EQ(owner[bitpos], -1)
                << layout.fb_name << ": bit " << bitpos << " claimed by both "
                << layout.placements[static_cast<std::size_t>(owner[bitpos])].field << " and " << p.field;
            owner[bitpos] = static_cast<int>(i);
        }
    }

    // Null map: full bytes then partial masks, no overlap with placements.
    std::vector<bool> null_bit(nbits, false);
    for (std::uint16_t byte : layout.full_null_bytes) {
        ASSERT_LT(byte, layout.total_size);
        for (unsigned b = 0; b < 8; ++b) {
            EXPECT_EQ(owner[std::size_t{byte} * 8 + b], -1)
                << layout.fb_name << ": full null byte " << byte << " is owned by a field";
            null_bit[std::size_t{byte} * 8 + b] = true;
        }
    }
    for (const auto& [byte, mask] : layout.partial_null_bits) {
        ASSERT_LT(byte, layout.total_size);
        EXPECT_NE(mask, 0);
        EXPECT_NE(mask, 0xff) << layout.fb_name << ": a fully null byte belongs in full_null_bytes";
        for (unsigned b = 0; b < 8; ++b) {
            if (!(mask >> b & 1)) continue;
            EXPECT_EQ(owner[std::size_t{byte} * 8 + b], -1)
                << layout.fb_name << ": null bit " << byte << "." << b << " is owned by a field";
            null_bit[std::size_t{byte} * 8 + b] = true;
        }
    }

    for (std::size_t bitpos = 0; bitpos < nbits; ++bitpos) {
        EXPECT_TRUE(owner[bitpos] != -1 || null_bit[bitpos])
            << layout.fb_name << ": bit " << bitpos << " is neither owned nor null";
        EXPECT_FALSE(owner[bitpos] != -1 && null_bit[bitpos])
            << layout.fb_name << ": bit " << bitpos << " is both owned and null";
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    EXPECT_TRUE(in.good()) << path;
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

#ifdef PCAAD_TEST_CONFIG_DIR
inline std::string config_path(const std::string& name) {
    return std::string(PCAAD_TEST_CONFIG_DIR) + "/" + name;
}
#endif

#ifdef PCAAD_CLI_BIN
struct CliResult {
    int code = -1;
    std::string out;
};

// Runs the real binary, captures stdout, maps the exit status.
inline CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    std::string cmd;
    if (!env_prefix.empty()) cmd += "env " + env_prefix + " ";
    cmd += "\"" PCAAD_CLI_BIN "\" " + args + " 2>/dev/null";

    CliResult result;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        ADD_FAILURE() << "popen failed for: " << cmd;
        return result;
    }
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) result.out += buf;
    const int status = ::pclose(pipe);
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}
#endif

} // namespace pcaad::test
