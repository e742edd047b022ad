#include "pcaad/types.hpp"

#include "pcaad/errors.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace pcaad {

unsigned width_bits(const ElemType& t) {
    switch (t.kind) {
    case Elem::Bool: return 1;
    case Elem::Byte: return 8;
    case Elem::Word:
    case Elem::Int: return 16;
    case Elem::DWord:
    case Elem::DInt:
    case Elem::Real: return 32;
    case Elem::String: return (static_cast<unsigned>(t.capacity) + 2) * 8;
    case Elem::Indirect: return 48;
    }
    return 0;
}

std::string elem_type_name(const ElemType& t) {
    switch (t.kind) {
    case Elem::Bool: return "BOOL";
    case Elem::Byte: return "BYTE";
    case Elem::Word: return "WORD";
    case Elem::Int: return "INT";
    case Elem::DWord: return "DWORD";
    case Elem::DInt: return "DINT";
    case Elem::Real: return "REAL";
    case Elem::Indirect: return "INDIRECT";
    case Elem::String:
        if (t.capacity == 254) return "STRING";
        return "STRING(" + std::to_string(t.capacity) + ")";
    }
    return "?";
}

ElemType parse_elem_type(const std::string& text) {
    if (text == "BOOL") return ElemType::simple(Elem::Bool);
    if (text == "BYTE") return ElemType::simple(Elem::Byte);
    if (text == "WORD") return ElemType::simple(Elem::Word);
    if (text == "INT") return ElemType::simple(Elem::Int);
    if (text == "DWORD") return ElemType::simple(Elem::DWord);
    if (text == "DINT") return ElemType::simple(Elem::DInt);
    if (text == "REAL") return ElemType::simple(Elem::Real);
    if (text == "INDIRECT") return ElemType::simple(Elem::Indirect);
    if (text == "STRING") return ElemType::string();
    if (text.rfind("STRING(", 0) == 0 && text.back() == ')') {
        const std::string num = text.substr(7, text.size() - 8);
        if (!num.empty() && num.find_first_not_of("0123456789") == std::string::npos) {
            long cap = std::strtol(num.c_str(), nullptr, 10);
            if (cap >= 0 && cap <= 254) return ElemType::string(static_cast<std::uint16_t>(cap));
        }
    }
    throw Error(ErrorCode::ConfigInvalid, "bad element type '" + text + "'");
}

const char* section_name(Section s) {
    switch (s) {
    case Section::Input: return "Input";
    case Section::Output: return "Output";
    case Section::InOut: return "InOut";
    case Section::Static: return "Static";
    }
    return "?";
}

Section parse_section(const std::string& text) {
    if (text == "Input") return Section::Input;
    if (text == "Output") return Section::Output;
    if (text == "InOut") return Section::InOut;
    if (text == "Static") return Section::Static;
    throw Error(ErrorCode::ConfigInvalid, "bad section '" + text + "'");
}

std::string block_id_name(const BlockId& id) {
    const char* kind = "?";
    switch (id.kind) {
    case BlockClass::OB: kind = "OB"; break;
    case BlockClass::DB: kind = "DB"; break;
    case BlockClass::FB: kind = "FB"; break;
    case BlockClass::FC: kind = "FC"; break;
    }
    return std::string(kind) + std::to_string(id.number);
}

unsigned width_bytes(Width w) {
    switch (w) {
    case Width::Bit:
    case Width::Byte: return 1;
    case Width::Word: return 2;
    case Width::DWord: return 4;
    }
    return 1;
}

char width_letter(Width w) {
    switch (w) {
    case Width::Bit: return 'X';
    case Width::Byte: return 'B';
    case Width::Word: return 'W';
    case Width::DWord: return 'D';
    }
    return '?';
}

namespace {

// Strict decimal parse: no sign, no leading junk. Returns false on overflow
// past `max` or empty/non-digit input.
bool parse_dec(const std::string& s, std::size_t begin, std::size_t end, std::uint32_t max,
               std::uint32_t& out) {
    if (begin >= end) return false;
    std::uint64_t v = 0;
    for (std::size_t i = begin; i < end; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
        if (v > max) return false;
    }
    out = static_cast<std::uint32_t>(v);
    return true;
}

[[noreturn]] void malformed(const std::string& text) {
    throw Error(ErrorCode::MalformedAddress, "'" + text + "'");
}

} // namespace

SymbolicAddress parse_address(const std::string& text) {
    // DB<n>.DB<X|B|W|D><byte>[.<bit>], letters case-insensitive.
    auto upper = [](char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); };

    if (text.size() < 7) malformed(text);
    if (upper(text[0]) != 'D' || upper(text[1]) != 'B') malformed(text);

    const std::size_t dot1 = text.find('.');
    if (dot1 == std::string::npos || dot1 < 3) malformed(text);

    std::uint32_t db = 0;
    if (!parse_dec(text, 2, dot1, 65535, db) || db == 0) malformed(text);

    // second component: DB<width letter><byte>
    std::size_t p = dot1 + 1;
    if (p + 3 > text.size()) malformed(text);
    if (upper(text[p]) != 'D' || upper(text[p + 1]) != 'B') malformed(text);

    Width width;
    switch (upper(text[p + 2])) {
    case 'X': width = Width::Bit; break;
    case 'B': width = Width::Byte; break;
    case 'W': width = Width::Word; break;
    case 'D': width = Width::DWord; break;
    default: malformed(text);
    }

    const std::size_t num_begin = p + 3;
    const std::size_t dot2 = text.find('.', num_begin);

    std::uint32_t byte_offset = 0;
    SymbolicAddress addr;
    addr.db = static_cast<std::uint16_t>(db);
    addr.width = width;

    if (width == Width::Bit) {
        if (dot2 == std::string::npos) malformed(text); // bit addresses need .<bit>
        if (!parse_dec(text, num_begin, dot2, 65535, byte_offset)) malformed(text);
        std::uint32_t bit = 0;
        if (!parse_dec(text, dot2 + 1, text.size(), 255, bit)) malformed(text);
        if (bit > 7) throw Error(ErrorCode::BitRangeError, "'" + text + "': bit " + std::to_string(bit));
        addr.bit = static_cast<std::uint8_t>(bit);
    } else {
        if (dot2 != std::string::npos) malformed(text); // .<bit> only valid for X
        if (!parse_dec(text, num_begin, text.size(), 65535, byte_offset)) malformed(text);
    }
    addr.byte_offset = byte_offset;
    return addr;
}

std::string format_address(const SymbolicAddress& a) {
    std::ostringstream out;
    out << "DB" << a.db << ".DB" << width_letter(a.width) << a.byte_offset;
    if (a.width == Width::Bit) out << '.' << static_cast<unsigned>(a.bit);
    return out.str();
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedAddress: return "MalformedAddress";
    case ErrorCode::BitRangeError: return "BitRangeError";
    case ErrorCode::DuplicateField: return "DuplicateField";
    case ErrorCode::DuplicateFbName: return "DuplicateFbName";
    case ErrorCode::FieldUnknown: return "FieldUnknown";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadVersion: return "BadVersion";
    case ErrorCode::TruncatedFrame: return "TruncatedFrame";
    case ErrorCode::OversizePayload: return "OversizePayload";
    case ErrorCode::TrailingBytes: return "TrailingBytes";
    case ErrorCode::BadArea: return "BadArea";
    case ErrorCode::LengthFieldInvalid: return "LengthFieldInvalid";
    case ErrorCode::NonAscii: return "NonAscii";
    case ErrorCode::CrcMismatch: return "CrcMismatch";
    case ErrorCode::BlockNotFound: return "BlockNotFound";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::Refused: return "Refused";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ConnectionFailed: return "ConnectionFailed";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::MethodUnavailable: return "MethodUnavailable";
    case ErrorCode::NoSuchTarget: return "NoSuchTarget";
    case ErrorCode::DanglingIndirect: return "DanglingIndirect";
    case ErrorCode::NoViableChannel: return "NoViableChannel";
    case ErrorCode::ChannelTimeout: return "ChannelTimeout";
    case ErrorCode::SyncViolation: return "SyncViolation";
    }
    return "Error";
}

} // namespace pcaad
