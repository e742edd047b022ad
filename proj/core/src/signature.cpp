#include "pcaad/signature.hpp"

#include "pcaad/bytes.hpp"
#include "pcaad/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

namespace pcaad {

using ordered_json = nlohmann::ordered_json;

const Signature* SignatureSet::find(const std::string& fb_name) const {
    for (const auto& s : entries)
        if (s.fb_name == fb_name) return &s;
    return nullptr;
}

namespace {

// Raw big-endian bit pattern of a numeric default, or nullopt when the field
// carries no usable known value (BOOLs have no byte-aligned pattern; zero
// defaults are indistinguishable from null noise).
std::optional<KnownValue> known_value_of(const Placement& p) {
    if (p.elem.kind == Elem::Bool || p.elem.kind == Elem::String || p.elem.kind == Elem::Indirect)
        return std::nullopt;
    std::uint32_t raw = 0;
    if (const auto* i = std::get_if<std::int64_t>(&p.default_value))
        raw = static_cast<std::uint32_t>(*i);
    else if (const auto* d = std::get_if<double>(&p.default_value))
        raw = float_to_bits(static_cast<float>(*d));
    else
        return std::nullopt;
    const unsigned w = width_bits(p.elem);
    if (w < 32) raw &= (1u << w) - 1;
    if (raw == 0) return std::nullopt;
    return KnownValue{static_cast<std::uint16_t>(p.byte_offset), static_cast<std::uint8_t>(w), raw};
}

} // namespace

Signature derive_signature(const DbLayout& layout) {
    Signature sig;
    sig.fb_name = layout.fb_name;
    sig.family = layout.family;
    sig.header = layout.header;
    sig.total_size = layout.total_size;
    sig.full_null_bytes = layout.full_null_bytes;
    sig.partial_null_bits.assign(layout.partial_null_bits.begin(), layout.partial_null_bits.end());
    for (const auto& p : layout.placements)
        if (auto kv = known_value_of(p)) sig.known_values.push_back(*kv);
    return sig;
}

SignatureSet build_signature_set(const std::vector<DbLayout>& layouts, SignatureSource source) {
    SignatureSet set;
    set.source = source;
    std::set<std::string> names;
    for (const auto& l : layouts) {
        if (!names.insert(l.fb_name).second) throw Error(ErrorCode::DuplicateFbName, l.fb_name);
        set.entries.push_back(derive_signature(l));
    }
    std::sort(set.entries.begin(), set.entries.end(), [](const Signature& a, const Signature& b) {
        return std::tie(a.total_size, a.fb_name) < std::tie(b.total_size, b.fb_name);
    });
    return set;
}

SignatureSet merge_signature_sets(const SignatureSet& base, const SignatureSet& extra) {
    SignatureSet out = base;
    out.source = SignatureSource::CustomGenerated;
    for (const auto& e : extra.entries) {
        auto it = std::find_if(out.entries.begin(), out.entries.end(),
                               [&](const Signature& s) { return s.fb_name == e.fb_name; });
        if (it != out.entries.end())
            *it = e;
        else
            out.entries.push_back(e);
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const Signature& a, const Signature& b) {
        return std::tie(a.total_size, a.fb_name) < std::tie(b.total_size, b.fb_name);
    });
    return out;
}

namespace {

ordered_json signature_to_json(const Signature& s) {
    ordered_json j;
    j["fb_name"] = s.fb_name;
    j["family"] = s.family;
    j["header"] = s.header;
    j["total_size"] = s.total_size;
    j["full_null_bytes"] = s.full_null_bytes;
    ordered_json partial = ordered_json::array();
    for (const auto& [off, mask] : s.partial_null_bits)
        partial.push_back(ordered_json{{"offset", off}, {"mask", mask}});
    j["partial_null_bits"] = partial;
    ordered_json known = ordered_json::array();
    for (const auto& kv : s.known_values)
        known.push_back(ordered_json{{"offset", kv.offset}, {"width_bits", kv.width_bits}, {"value", kv.value}});
    j["known_values"] = known;
    j["provisional"] = s.provisional;
    return j;
}

Signature signature_from_json(const nlohmann::json& j) {
    Signature s;
    s.fb_name = j.at("fb_name").get<std::string>();
    s.family = j.at("family").get<std::string>();
    s.header = j.at("header").get<std::string>();
    s.total_size = j.at("total_size").get<std::uint16_t>();
    s.full_null_bytes = j.at("full_null_bytes").get<std::vector<std::uint16_t>>();
    for (const auto& p : j.at("partial_null_bits"))
        s.partial_null_bits.emplace_back(p.at("offset").get<std::uint16_t>(), p.at("mask").get<std::uint8_t>());
    for (const auto& k : j.at("known_values"))
        s.known_values.push_back(KnownValue{k.at("offset").get<std::uint16_t>(),
                                            k.at("width_bits").get<std::uint8_t>(),
                                            k.at("value").get<std::uint32_t>()});
    s.provisional = j.value("provisional", false);
    return s;
}

} // namespace

std::string signature_set_to_json(const SignatureSet& set) {
    ordered_json j;
    j["version"] = set.version;
    j["source"] = set.source == SignatureSource::VendorCatalog ? "VendorCatalog" : "CustomGenerated";
    ordered_json entries = ordered_json::array();
    for (const auto& s : set.entries) entries.push_back(signature_to_json(s));
    j["entries"] = entries;
    return j.dump(2) + "\n";
}

SignatureSet signature_set_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        SignatureSet set;
        set.version = j.at("version").get<std::string>();
        const std::string source = j.at("source").get<std::string>();
        if (source == "VendorCatalog")
            set.source = SignatureSource::VendorCatalog;
        else if (source == "CustomGenerated")
            set.source = SignatureSource::CustomGenerated;
        else
            throw Error(ErrorCode::ConfigInvalid, "signature source '" + source + "'");
        for (const auto& e : j.at("entries")) set.entries.push_back(signature_from_json(e));
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("signature file: ") + e.what());
    }
}

void save_signature_set(const SignatureSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path);
    out << signature_set_to_json(set);
}

SignatureSet load_signature_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return signature_set_from_json(text);
}

} // namespace pcaad
