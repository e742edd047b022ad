#include "pcaad/layout.hpp"

#include "pcaad/errors.hpp"

#include <algorithm>
#include <set>

namespace pcaad {

const Placement* DbLayout::find(const std::string& field) const {
    for (const auto& p : placements)
        if (p.field == field) return &p;
    return nullptr;
}

const Placement& DbLayout::at(const std::string& field) const {
    const Placement* p = find(field);
    if (!p) throw Error(ErrorCode::FieldUnknown, fb_name + "." + field);
    return *p;
}

DbLayout compile_layout(const std::vector<FieldSpec>& fields) {
    DbLayout out;
    std::set<std::string> seen;
    std::uint32_t cursor = 0; // bit cursor from start of block

    for (const auto& f : fields) {
        if (!seen.insert(f.name).second) throw Error(ErrorCode::DuplicateField, f.name);

        Placement p;
        p.field = f.name;
        p.elem = f.elem;
        p.section = f.section;
        p.default_value = f.default_value;
        p.indirect_target = f.indirect_target;

        if (f.elem.kind == Elem::Bool) {
            p.byte_offset = cursor / 8;
            p.bit = static_cast<std::uint8_t>(cursor % 8);
            cursor += 1;
        } else {
            cursor = (cursor + 15) / 16 * 16; // next even byte
            p.byte_offset = cursor / 8;
            p.bit = 0;
            cursor += width_bits(f.elem);
        }
        out.placements.push_back(std::move(p));
    }

    const std::uint32_t total_bits = (cursor + 15) / 16 * 16;
    out.total_size = static_cast<std::uint16_t>(total_bits / 8);

    // Complement of the placement bits is the null space.
    std::vector<bool> used(total_bits, false);
    for (const auto& p : out.placements) {
        if (p.elem.kind == Elem::Bool) {
            used[p.byte_offset * 8 + p.bit] = true;
        } else {
            const unsigned w = width_bits(p.elem);
            for (unsigned i = 0; i < w; ++i) used[p.byte_offset * 8 + i] = true;
        }
    }
    for (std::uint32_t byte = 0; byte < out.total_size; ++byte) {
        std::uint8_t mask = 0;
        for (unsigned bit = 0; bit < 8; ++bit)
            if (!used[byte * 8 + bit]) mask |= static_cast<std::uint8_t>(1u << bit);
        if (mask == 0xff)
            out.full_null_bytes.push_back(static_cast<std::uint16_t>(byte));
        else if (mask != 0)
            out.partial_null_bits[static_cast<std::uint16_t>(byte)] = mask;
    }
    return out;
}

} // namespace pcaad
