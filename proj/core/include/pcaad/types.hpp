#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace pcaad {

// Element types of data-block fields. Widths follow the 16-bit allocation
// model: BOOL is a single bit, STRING(n) occupies n+2 bytes (max length byte,
// current length byte, characters), INDIRECT is a 6-byte area pointer.
enum class Elem : std::uint8_t {
    Bool,
    Byte,
    Word,
    Int,
    DWord,
    DInt,
    Real,
    String,
    Indirect,
};

struct ElemType {
    Elem kind = Elem::Bool;
    std::uint16_t capacity = 0; // STRING only: character capacity, <= 254

    static ElemType simple(Elem k) { return ElemType{k, 0}; }
    static ElemType string(std::uint16_t cap = 254) { return ElemType{Elem::String, cap}; }

    bool operator==(const ElemType&) const = default;
};

// Field width in bits.
unsigned width_bits(const ElemType& t);

// "BOOL", "WORD", "STRING", "STRING(32)", ... Parse throws ConfigInvalid.
std::string elem_type_name(const ElemType& t);
ElemType parse_elem_type(const std::string& text);

enum class Section : std::uint8_t { Input, Output, InOut, Static };

const char* section_name(Section s);
Section parse_section(const std::string& text);

// Typed declaration default. monostate = no default declared.
using Literal = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

struct FieldSpec {
    std::string name;
    ElemType elem;
    Section section = Section::Input;
    Literal default_value{};
    // INDIRECT fields only: declared type at the pointer target, used to size
    // remote reads when the pointer is followed.
    std::optional<ElemType> indirect_target{};

    bool operator==(const FieldSpec&) const = default;
};

enum class BlockClass : std::uint8_t { OB = 1, DB = 2, FB = 3, FC = 4 };

struct BlockId {
    BlockClass kind = BlockClass::DB;
    std::uint16_t number = 0;

    bool operator==(const BlockId&) const = default;
    auto operator<=>(const BlockId&) const = default;
};

std::string block_id_name(const BlockId& id); // "DB5", "FB3", ...

// Metadata surfaced by BlockInfo responses and block image headers.
struct BlockMeta {
    BlockId id;
    std::string family;  // <= 8 ASCII chars, space padded on the wire
    std::string header;  // <= 8 ASCII chars
    std::uint8_t version_major = 1;
    std::uint8_t version_minor = 0;
    std::uint16_t body_length = 0;
    std::optional<BlockId> associated_fb{};

    bool operator==(const BlockMeta&) const = default;
};

// Symbolic data-block address: DB<n>.DB<X|B|W|D><byte>[.<bit>]
// X (bit) addresses require the .<bit> suffix; the other widths forbid it.
enum class Width : std::uint8_t { Bit, Byte, Word, DWord };

unsigned width_bytes(Width w);
char width_letter(Width w);

struct SymbolicAddress {
    std::uint16_t db = 0;
    Width width = Width::Byte;
    std::uint32_t byte_offset = 0;
    std::uint8_t bit = 0; // Width::Bit only

    bool operator==(const SymbolicAddress&) const = default;
};

// Throws MalformedAddress / BitRangeError.
SymbolicAddress parse_address(const std::string& text);
// Canonical uppercase rendering; format(parse(s)) == s for canonical s.
std::string format_address(const SymbolicAddress& a);

} // namespace pcaad
