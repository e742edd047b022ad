#pragma once

#include "pcaad/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pcaad {

struct Placement {
    std::string field;
    ElemType elem;
    Section section = Section::Input;
    std::uint32_t byte_offset = 0;
    std::uint8_t bit = 0; // BOOL only
    Literal default_value{};
    std::optional<ElemType> indirect_target{};

    bool operator==(const Placement&) const = default;
};

// Compiled memory map of one FB instance data block.
//
// Allocation walks the declaration in order over 16-bit blocks: consecutive
// BOOLs take successive bits (spilling into the second byte of the block);
// any non-BOOL field starts at the next even byte. Total size rounds up to
// an even byte count and every bit not covered by a placement is null space.
struct DbLayout {
    std::string fb_name;
    std::string family;
    std::string header;
    bool whole_block_sensitive = false;

    std::uint16_t total_size = 0;
    std::vector<Placement> placements;
    std::vector<std::uint16_t> full_null_bytes;              // sorted
    std::map<std::uint16_t, std::uint8_t> partial_null_bits; // byte offset -> mask of unused bits (bit 0 = LSB)

    const Placement* find(const std::string& field) const;
    const Placement& at(const std::string& field) const; // throws FieldUnknown
};

// Pure: same fields, same layout. Throws DuplicateField on repeated names.
DbLayout compile_layout(const std::vector<FieldSpec>& fields);

} // namespace pcaad
