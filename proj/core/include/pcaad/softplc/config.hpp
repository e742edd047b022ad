#pragma once

#include "pcaad/bytes.hpp"
#include "pcaad/catalog.hpp"
#include "pcaad/layout.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pcaad::softplc {

// How an FB input gets its value.
//   Default:        declaration default, written once at startup
//   DirectConstant: fixed value copied into the input every cycle
//   GlobalVb:       copied from a global VB location every cycle
enum class BindingMode : std::uint8_t { Default, DirectConstant, GlobalVb };

struct InputBinding {
    std::string field;
    BindingMode mode = BindingMode::Default;
    Literal constant{};          // DirectConstant
    SymbolicAddress source{};    // GlobalVb

    bool operator==(const InputBinding&) const = default;
};

struct FbInstanceConfig {
    std::string fb_name;
    std::uint16_t db = 0;
    std::vector<InputBinding> bindings;
    Behavior behavior = Behavior::Passive; // resolved from the catalog at load

    bool operator==(const FbInstanceConfig&) const = default;
};

struct GlobalDbConfig {
    std::uint16_t db = 0;
    Bytes bytes; // full initial content, size even and >= 2

    bool operator==(const GlobalDbConfig&) const = default;
};

struct Features {
    bool uploads_enabled = true;
    bool block_info_enabled = true; // also gates ListBlocks
    bool writes_enabled = true;

    bool operator==(const Features&) const = default;
};

struct PlcConfig {
    std::string listen_host = "127.0.0.1";
    std::uint16_t listen_port = 10102;
    std::uint32_t cycle_time_ms = 10;
    Features features;
    Catalog catalog;
    std::vector<GlobalDbConfig> global_dbs;
    std::vector<FbInstanceConfig> instances;
};

// Throws ConfigInvalid with a field path in the message. Relative catalog
// paths resolve against the config file's directory.
PlcConfig load_config(const std::string& path);
PlcConfig config_from_json(const std::string& text, const std::string& base_dir = ".");

} // namespace pcaad::softplc
