#include "pcaad/softplc/config.hpp"

#include "pcaad/errors.hpp"
#include "pcaad/spp/wire_values.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>

namespace pcaad::softplc {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& why) {
    throw Error(ErrorCode::ConfigInvalid, path + ": " + why);
}

// Matching widths for GlobalVb bindings.
bool width_compatible(const ElemType& elem, Width w) {
    switch (elem.kind) {
    case Elem::Bool: return w == Width::Bit;
    case Elem::Byte: return w == Width::Byte;
    case Elem::Word:
    case Elem::Int: return w == Width::Word;
    case Elem::DWord:
    case Elem::DInt:
    case Elem::Real: return w == Width::DWord;
    default: return false; // STRING / INDIRECT inputs bind via constants only
    }
}

Literal constant_from_json(const json& j, const ElemType& elem, const std::string& where) {
    switch (elem.kind) {
    case Elem::Bool:
        if (j.is_boolean()) return j.get<bool>();
        if (j.is_number_integer() && (j.get<std::int64_t>() == 0 || j.get<std::int64_t>() == 1))
            return j.get<std::int64_t>() != 0;
        bad(where, "BOOL constant must be true/false");
    case Elem::Real:
        if (!j.is_number()) bad(where, "REAL constant must be numeric");
        return j.get<double>();
    case Elem::String:
    case Elem::Indirect:
        if (!j.is_string()) bad(where, "constant must be a string");
        return j.get<std::string>();
    default:
        if (!j.is_number_integer()) bad(where, "integer constant required");
        return j.get<std::int64_t>();
    }
}

void apply_init_item(const json& item, Bytes& bytes, const std::string& where) {
    if (!item.is_object()) bad(where, "init item must be an object");
    const auto offset = item.at("offset").get<std::uint32_t>();
    const ElemType elem = parse_elem_type(item.at("type").get<std::string>());
    const std::string vwhere = where + " (offset " + std::to_string(offset) + ")";

    if (elem.kind == Elem::Bool) {
        const auto bit = item.value("bit", 0u);
        if (bit > 7) throw Error(ErrorCode::BitRangeError, vwhere);
        if (offset >= bytes.size()) bad(vwhere, "offset beyond block");
        const Literal lit = constant_from_json(item.at("value"), elem, vwhere);
        if (std::get<bool>(lit))
            bytes[offset] |= static_cast<std::uint8_t>(1u << bit);
        else
            bytes[offset] &= static_cast<std::uint8_t>(~(1u << bit));
        return;
    }

    const Literal lit = constant_from_json(item.at("value"), elem, vwhere);
    Bytes encoded;
    try {
        encoded = spp::encode_field_literal(elem, lit);
    } catch (const Error& e) {
        bad(vwhere, e.what());
    }
    if (offset + encoded.size() > bytes.size()) bad(vwhere, "value extends beyond block");
    std::copy(encoded.begin(), encoded.end(), bytes.begin() + offset);
}

} // namespace

PlcConfig config_from_json(const std::string& text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("config: ") + e.what());
    }
    if (!root.is_object()) throw Error(ErrorCode::ConfigInvalid, "config: top level must be an object");

    PlcConfig cfg;
    try {
        if (root.contains("listen")) {
            const auto listen = root.at("listen").get<std::string>();
            const auto colon = listen.rfind(':');
            if (colon == std::string::npos) bad("listen", "expected host:port");
            cfg.listen_host = listen.substr(0, colon);
            const long port = std::strtol(listen.c_str() + colon + 1, nullptr, 10);
            if (port < 0 || port > 65535) bad("listen", "bad port");
            cfg.listen_port = static_cast<std::uint16_t>(port);
        }
        cfg.cycle_time_ms = root.value("cycle_time_ms", 10u);
        if (cfg.cycle_time_ms == 0) bad("cycle_time_ms", "must be >= 1");

        if (root.contains("features")) {
            const auto& f = root.at("features");
            cfg.features.uploads_enabled = f.value("uploads_enabled", true);
            cfg.features.block_info_enabled = f.value("block_info_enabled", true);
            cfg.features.writes_enabled = f.value("writes_enabled", true);
        }

        if (root.contains("catalog")) {
            std::filesystem::path p = root.at("catalog").get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            cfg.catalog = load_catalog(p.string());
        } else {
            cfg.catalog = builtin_catalog();
        }

        std::set<std::uint16_t> db_numbers;

        for (std::size_t i = 0; root.contains("global_dbs") && i < root.at("global_dbs").size(); ++i) {
            const auto& jg = root.at("global_dbs")[i];
            const std::string where = "global_dbs[" + std::to_string(i) + "]";
            GlobalDbConfig g;
            g.db = jg.at("db").get<std::uint16_t>();
            if (g.db == 0) bad(where + ".db", "DB numbers start at 1");
            if (!db_numbers.insert(g.db).second) bad(where + ".db", "duplicate DB number");
            const auto size = jg.at("size").get<std::uint32_t>();
            if (size < 2 || size % 2 != 0 || size > 65535)
                bad(where + ".size", "size must be even, >= 2 and <= 65535");
            g.bytes.assign(size, 0);
            if (jg.contains("init"))
                for (std::size_t k = 0; k < jg.at("init").size(); ++k)
                    apply_init_item(jg.at("init")[k], g.bytes,
                                    where + ".init[" + std::to_string(k) + "]");
            cfg.global_dbs.push_back(std::move(g));
        }

        if (!root.contains("fb_instances")) bad("fb_instances", "missing");
        for (std::size_t i = 0; i < root.at("fb_instances").size(); ++i) {
            const auto& ji = root.at("fb_instances")[i];
            const std::string where = "fb_instances[" + std::to_string(i) + "]";
            FbInstanceConfig inst;
            inst.fb_name = ji.at("fb").get<std::string>();
            inst.db = ji.at("db").get<std::uint16_t>();
            if (inst.db == 0) bad(where + ".db", "DB numbers start at 1");
            if (!db_numbers.insert(inst.db).second) bad(where + ".db", "duplicate DB number");

            const FbDecl* decl = cfg.catalog.find(inst.fb_name);
            if (!decl) bad(where + ".fb", "unknown FB '" + inst.fb_name + "'");
            inst.behavior = decl->behavior;
            if (ji.contains("behavior")) inst.behavior = parse_behavior(ji.at("behavior").get<std::string>());

            const DbLayout layout = compile_layout(*decl);
            if (layout.total_size < 2) bad(where, "instance DB would be smaller than 2 bytes");

            std::set<std::string> bound;
            for (std::size_t k = 0; ji.contains("bindings") && k < ji.at("bindings").size(); ++k) {
                const auto& jb = ji.at("bindings")[k];
                const std::string bwhere = where + ".bindings[" + std::to_string(k) + "]";
                InputBinding b;
                b.field = jb.at("field").get<std::string>();
                const Placement* p = layout.find(b.field);
                if (!p) bad(bwhere + ".field", "no field '" + b.field + "' in " + inst.fb_name);
                if (p->section != Section::Input && p->section != Section::InOut)
                    bad(bwhere + ".field", "'" + b.field + "' is not an input");
                if (!bound.insert(b.field).second) bad(bwhere + ".field", "field bound twice");

                const bool has_const = jb.contains("constant");
                const bool has_global = jb.contains("global");
                if (has_const == has_global)
                    bad(bwhere, "exactly one of constant/global required");
                if (has_const) {
                    b.mode = BindingMode::DirectConstant;
                    b.constant = constant_from_json(jb.at("constant"), p->elem, bwhere + ".constant");
                    if (p->elem.kind == Elem::Indirect) parse_address(std::get<std::string>(b.constant));
                    if (p->elem.kind == Elem::String) {
                        const auto& s = std::get<std::string>(b.constant);
                        if (s.size() > p->elem.capacity) bad(bwhere + ".constant", "longer than capacity");
                    }
                } else {
                    b.mode = BindingMode::GlobalVb;
                    b.source = parse_address(jb.at("global").get<std::string>());
                    if (!width_compatible(p->elem, b.source.width))
                        bad(bwhere + ".global", "width does not match field type " +
                                                    elem_type_name(p->elem));
                }
                inst.bindings.push_back(std::move(b));
            }
            cfg.instances.push_back(std::move(inst));
        }

        // GlobalVb sources must land inside an existing DB.
        auto db_size = [&](std::uint16_t db) -> std::optional<std::size_t> {
            for (const auto& g : cfg.global_dbs)
                if (g.db == db) return g.bytes.size();
            for (const auto& inst : cfg.instances)
                if (inst.db == db) {
                    const FbDecl* d = cfg.catalog.find(inst.fb_name);
                    return compile_layout(*d).total_size;
                }
            return std::nullopt;
        };
        for (std::size_t i = 0; i < cfg.instances.size(); ++i) {
            for (const auto& b : cfg.instances[i].bindings) {
                if (b.mode != BindingMode::GlobalVb) continue;
                const std::string bwhere =
                    "fb_instances[" + std::to_string(i) + "].bindings (field " + b.field + ")";
                const auto size = db_size(b.source.db);
                if (!size) bad(bwhere, "source DB" + std::to_string(b.source.db) + " does not exist");
                const unsigned w = width_bytes(b.source.width);
                if (b.source.byte_offset + w > *size) bad(bwhere, "source beyond DB end");
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("config: ") + e.what());
    }
    return cfg;
}

PlcConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text, std::filesystem::path(path).parent_path().string());
}

} // namespace pcaad::softplc
