#pragma once

#include "pcaad/layout.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pcaad {

// Expected content at a placement, derived from non-zero declaration
// defaults. `value` holds the raw big-endian bit pattern of the field (REAL
// is stored as its IEEE-754 bits) so serialization stays integer-typed.
struct KnownValue {
    std::uint16_t offset = 0;
    std::uint8_t width_bits = 0; // 8, 16 or 32
    std::uint32_t value = 0;

    bool operator==(const KnownValue&) const = default;
};

// What an FB instance data block looks like from the outside: size, null
// space shape and any well-known default content. This is all a remote
// observer needs to match a block against a library FB.
struct Signature {
    std::string fb_name;
    std::string family;
    std::string header;
    std::uint16_t total_size = 0;
    std::vector<std::uint16_t> full_null_bytes;
    std::vector<std::pair<std::uint16_t, std::uint8_t>> partial_null_bits; // sorted by offset
    std::vector<KnownValue> known_values;
    bool provisional = false; // generated from observation, not from a declaration

    bool operator==(const Signature&) const = default;
};

enum class SignatureSource { VendorCatalog, CustomGenerated };

struct SignatureSet {
    std::string version = "1";
    SignatureSource source = SignatureSource::VendorCatalog;
    std::vector<Signature> entries; // sorted by (total_size, fb_name)

    const Signature* find(const std::string& fb_name) const;
};

// Pure projection of a layout into its observable signature.
Signature derive_signature(const DbLayout& layout);

// Sorts entries by (total_size, fb_name). Duplicate fb_names across layouts
// throw DuplicateFbName; identical shapes under different names are retained.
SignatureSet build_signature_set(const std::vector<DbLayout>& layouts,
                                 SignatureSource source = SignatureSource::VendorCatalog);

// `extra` entries replace same-named entries in `base`; result is re-sorted
// and marked CustomGenerated.
SignatureSet merge_signature_sets(const SignatureSet& base, const SignatureSet& extra);

// Deterministic serialization: same set -> byte-identical JSON.
std::string signature_set_to_json(const SignatureSet& set);
SignatureSet signature_set_from_json(const std::string& text);
void save_signature_set(const SignatureSet& set, const std::string& path);
SignatureSet load_signature_set(const std::string& path);

} // namespace pcaad
