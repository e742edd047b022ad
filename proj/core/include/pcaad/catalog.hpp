#pragma once

#include "pcaad/layout.hpp"
#include "pcaad/signature.hpp"

#include <string>
#include <vector>

namespace pcaad {

// Simulated logic attached to an FB instance each cycle.
enum class Behavior : std::uint8_t {
    Passive,       // data only, no logic
    ModbusCommLoad,
    AsMail,
    IecCountUp,
    Smc,           // compares the whole 16-bit input block, see whole_block_sensitive
};

const char* behavior_name(Behavior b);
Behavior parse_behavior(const std::string& text);

// One library FB declaration: identity plus ordered field list.
struct FbDecl {
    std::string fb_name;
    std::string family; // <= 8 ASCII
    std::string header; // <= 8 ASCII
    std::vector<FieldSpec> fields;
    Behavior behavior = Behavior::Passive;
    // The FB's logic watches the full 16-bit block containing its trigger
    // bit, so writes into that block's null bits alter behavior.
    bool whole_block_sensitive = false;

    bool operator==(const FbDecl&) const = default;
};

struct Catalog {
    std::vector<FbDecl> decls;

    const FbDecl* find(const std::string& fb_name) const;
};

// Layout of one declaration, stamped with the FB identity.
DbLayout compile_layout(const FbDecl& decl);

// One signature per declaration; see build_signature_set(layouts).
SignatureSet build_signature_set(const Catalog& catalog,
                                 SignatureSource source = SignatureSource::VendorCatalog);

// Library FBs shipped with the simulator. Six passive/active blocks with
// pairwise distinct sizes plus SMC, the whole-block-sensitive case.
const Catalog& builtin_catalog();

// JSON catalog files: array of {fb_name, family, header, fields:[...]}.
std::string catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const std::string& text);
void save_catalog(const Catalog& catalog, const std::string& path);
Catalog load_catalog(const std::string& path);

} // namespace pcaad
