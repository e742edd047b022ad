#include "pcaad/spp/wire_values.hpp"

#include "pcaad/errors.hpp"

#include <algorithm>
#include <sstream>

namespace pcaad::spp {

IndirectAddress IndirectAddress::to(std::uint16_t db, std::uint32_t byte_offset, std::uint8_t bit) {
    if (bit > 7) throw Error(ErrorCode::BitRangeError, "bit " + std::to_string(bit));
    if (byte_offset > 0x1fffff)
        throw Error(ErrorCode::MalformedAddress, "byte offset " + std::to_string(byte_offset) +
                                                     " exceeds 24-bit pointer range");
    return IndirectAddress{db, byte_offset << 3 | bit};
}

Bytes encode_indirect(const IndirectAddress& a) {
    Bytes out(kIndirectSize);
    store_u16(out.data(), a.db);
    out[2] = kAreaDb;
    out[3] = static_cast<std::uint8_t>(a.bit_address >> 16);
    out[4] = static_cast<std::uint8_t>(a.bit_address >> 8);
    out[5] = static_cast<std::uint8_t>(a.bit_address & 0xff);
    return out;
}

IndirectAddress decode_indirect(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kIndirectSize)
        throw Error(ErrorCode::TruncatedFrame, "pointer needs 6 bytes, got " + std::to_string(bytes.size()));
    if (bytes.size() > kIndirectSize)
        throw Error(ErrorCode::TrailingBytes, "pointer is 6 bytes, got " + std::to_string(bytes.size()));
    if (bytes[2] != kAreaDb)
        throw Error(ErrorCode::BadArea, "area 0x" + hex_dump(bytes.subspan(2, 1)));
    IndirectAddress a;
    a.db = load_u16(bytes, 0);
    a.bit_address = static_cast<std::uint32_t>(bytes[3]) << 16 |
                    static_cast<std::uint32_t>(bytes[4]) << 8 | bytes[5];
    return a;
}

Bytes encode_plc_string(const std::string& text, std::uint8_t capacity) {
    if (text.size() > capacity)
        throw Error(ErrorCode::LengthFieldInvalid,
                    "text length " + std::to_string(text.size()) + " > capacity " + std::to_string(capacity));
    for (char c : text)
        if (static_cast<unsigned char>(c) > 0x7f) throw Error(ErrorCode::NonAscii, "in string literal");
    Bytes out(static_cast<std::size_t>(capacity) + 2, 0);
    out[0] = capacity;
    out[1] = static_cast<std::uint8_t>(text.size());
    std::copy(text.begin(), text.end(), out.begin() + 2);
    return out;
}

std::string decode_plc_string(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2) throw Error(ErrorCode::LengthFieldInvalid, "buffer shorter than 2 bytes");
    const std::uint8_t max_len = bytes[0];
    const std::uint8_t cur_len = bytes[1];
    if (cur_len > max_len)
        throw Error(ErrorCode::LengthFieldInvalid,
                    "cur " + std::to_string(cur_len) + " > max " + std::to_string(max_len));
    if (bytes.size() < 2u + cur_len)
        throw Error(ErrorCode::LengthFieldInvalid, "buffer shorter than current length");
    std::string out;
    out.reserve(cur_len);
    for (std::size_t i = 0; i < cur_len; ++i) {
        if (bytes[2 + i] > 0x7f) throw Error(ErrorCode::NonAscii, "byte " + std::to_string(2 + i));
        out.push_back(static_cast<char>(bytes[2 + i]));
    }
    return out;
}

std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes) {
    std::uint16_t crc = 0xffff;
    for (std::uint8_t b : bytes) {
        crc ^= static_cast<std::uint16_t>(b) << 8;
        for (int i = 0; i < 8; ++i)
            crc = crc & 0x8000 ? static_cast<std::uint16_t>(crc << 1 ^ 0x1021)
                               : static_cast<std::uint16_t>(crc << 1);
    }
    return crc;
}

namespace {

void put_padded(std::uint8_t* dst, const std::string& text) {
    for (std::size_t i = 0; i < 8; ++i)
        dst[i] = i < text.size() ? static_cast<std::uint8_t>(text[i]) : ' ';
}

std::string trim_padded(std::span<const std::uint8_t> src) {
    std::string out(src.begin(), src.end());
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

} // namespace

Bytes encode_block_image(const BlockImage& image) {
    Bytes out(kImageHeaderSize + image.body.size(), 0);
    out[0] = static_cast<std::uint8_t>(image.meta.id.kind);
    store_u16(out.data() + 1, image.meta.id.number);
    put_padded(out.data() + 3, image.meta.family);
    put_padded(out.data() + 11, image.meta.header);
    put_padded(out.data() + 19, image.author);
    out[27] = image.meta.version_major;
    out[28] = image.meta.version_minor;
    // 29..31 reserved, zero
    store_u16(out.data() + 32, static_cast<std::uint16_t>(image.body.size()));
    std::copy(image.body.begin(), image.body.end(), out.begin() + kImageHeaderSize);

    // CRC over everything before the crc field plus the body.
    Bytes crc_input(out.begin(), out.begin() + 34);
    crc_input.insert(crc_input.end(), image.body.begin(), image.body.end());
    store_u16(out.data() + 34, crc16_ccitt(crc_input));
    return out;
}

BlockImage decode_block_image(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kImageHeaderSize)
        throw Error(ErrorCode::TruncatedFrame, "image header needs 36 bytes");
    const std::uint16_t body_length = load_u16(bytes, 32);
    if (bytes.size() < kImageHeaderSize + body_length)
        throw Error(ErrorCode::TruncatedFrame, "image body truncated");
    if (bytes.size() > kImageHeaderSize + body_length)
        throw Error(ErrorCode::TrailingBytes, "bytes after image body");

    Bytes crc_input(bytes.begin(), bytes.begin() + 34);
    crc_input.insert(crc_input.end(), bytes.begin() + kImageHeaderSize, bytes.end());
    const std::uint16_t want = load_u16(bytes, 34);
    const std::uint16_t got = crc16_ccitt(crc_input);
    if (want != got) {
        std::ostringstream msg;
        msg << "stored 0x" << std::hex << want << ", computed 0x" << got;
        throw Error(ErrorCode::CrcMismatch, msg.str());
    }

    BlockImage image;
    image.meta.id.kind = static_cast<BlockClass>(bytes[0]);
    image.meta.id.number = load_u16(bytes, 1);
    image.meta.family = trim_padded(bytes.subspan(3, 8));
    image.meta.header = trim_padded(bytes.subspan(11, 8));
    image.author = trim_padded(bytes.subspan(19, 8));
    image.meta.version_major = bytes[27];
    image.meta.version_minor = bytes[28];
    image.meta.body_length = body_length;
    image.body.assign(bytes.begin() + kImageHeaderSize, bytes.end());
    return image;
}

Bytes encode_block_meta(const BlockMeta& meta) {
    Bytes out(23, 0);
    out[0] = static_cast<std::uint8_t>(meta.id.kind);
    store_u16(out.data() + 1, meta.id.number);
    put_padded(out.data() + 3, meta.family);
    put_padded(out.data() + 11, meta.header);
    out[19] = meta.version_major;
    out[20] = meta.version_minor;
    store_u16(out.data() + 21, meta.body_length);
    out.push_back(meta.associated_fb ? 1 : 0);
    if (meta.associated_fb) {
        out.push_back(static_cast<std::uint8_t>(meta.associated_fb->kind));
        append_u16(out, meta.associated_fb->number);
    }
    return out;
}

BlockMeta decode_block_meta(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 24) throw Error(ErrorCode::TruncatedFrame, "block meta needs 24+ bytes");
    BlockMeta meta;
    meta.id.kind = static_cast<BlockClass>(bytes[0]);
    meta.id.number = load_u16(bytes, 1);
    meta.family = trim_padded(bytes.subspan(3, 8));
    meta.header = trim_padded(bytes.subspan(11, 8));
    meta.version_major = bytes[19];
    meta.version_minor = bytes[20];
    meta.body_length = load_u16(bytes, 21);
    const std::uint8_t flag = bytes[23];
    if (flag) {
        if (bytes.size() < 27) throw Error(ErrorCode::TruncatedFrame, "associated fb truncated");
        BlockId fb;
        fb.kind = static_cast<BlockClass>(bytes[24]);
        fb.number = load_u16(bytes, 25);
        meta.associated_fb = fb;
        if (bytes.size() > 27) throw Error(ErrorCode::TrailingBytes, "after block meta");
    } else if (bytes.size() > 24) {
        throw Error(ErrorCode::TrailingBytes, "after block meta");
    }
    return meta;
}

Bytes encode_field_literal(const ElemType& elem, const Literal& value) {
    switch (elem.kind) {
    case Elem::Bool:
        throw Error(ErrorCode::Malformed, "BOOL fields are written via read-modify-write");
    case Elem::Byte: {
        const auto* i = std::get_if<std::int64_t>(&value);
        if (!i || *i < 0 || *i > 0xff) throw Error(ErrorCode::Malformed, "BYTE literal out of range");
        return Bytes{static_cast<std::uint8_t>(*i)};
    }
    case Elem::Word:
    case Elem::Int: {
        const auto* i = std::get_if<std::int64_t>(&value);
        const std::int64_t lo = elem.kind == Elem::Int ? -32768 : 0;
        const std::int64_t hi = elem.kind == Elem::Int ? 32767 : 65535;
        if (!i || *i < lo || *i > hi) throw Error(ErrorCode::Malformed, "16-bit literal out of range");
        Bytes out;
        append_u16(out, static_cast<std::uint16_t>(*i));
        return out;
    }
    case Elem::DWord:
    case Elem::DInt: {
        const auto* i = std::get_if<std::int64_t>(&value);
        const std::int64_t lo = elem.kind == Elem::DInt ? std::int64_t{-2147483648} : 0;
        const std::int64_t hi = elem.kind == Elem::DInt ? 2147483647 : 4294967295;
        if (!i || *i < lo || *i > hi) throw Error(ErrorCode::Malformed, "32-bit literal out of range");
        Bytes out;
        append_u32(out, static_cast<std::uint32_t>(*i));
        return out;
    }
    case Elem::Real: {
        double d;
        if (const auto* pd = std::get_if<double>(&value))
            d = *pd;
        else if (const auto* pi = std::get_if<std::int64_t>(&value))
            d = static_cast<double>(*pi);
        else
            throw Error(ErrorCode::Malformed, "REAL literal must be numeric");
        Bytes out;
        append_u32(out, float_to_bits(static_cast<float>(d)));
        return out;
    }
    case Elem::String: {
        const auto* s = std::get_if<std::string>(&value);
        if (!s) throw Error(ErrorCode::Malformed, "STRING literal required");
        return encode_plc_string(*s, static_cast<std::uint8_t>(elem.capacity));
    }
    case Elem::Indirect: {
        const auto* s = std::get_if<std::string>(&value);
        if (!s) throw Error(ErrorCode::Malformed, "INDIRECT literal must be a DB address string");
        const SymbolicAddress a = parse_address(*s);
        return encode_indirect(IndirectAddress::to(a.db, a.byte_offset, a.bit));
    }
    }
    throw Error(ErrorCode::Malformed, "bad element type");
}

FieldValue decode_field_bytes(const ElemType& elem, std::span<const std::uint8_t> bytes,
                              std::uint8_t bit) {
    const std::size_t want = elem.kind == Elem::Bool ? 1 : width_bits(elem) / 8;
    if (bytes.size() != want)
        throw Error(ErrorCode::TruncatedFrame, "field needs " + std::to_string(want) + " bytes, got " +
                                                   std::to_string(bytes.size()));
    switch (elem.kind) {
    case Elem::Bool: return (bytes[0] >> bit & 1) != 0;
    case Elem::Byte: return static_cast<std::int64_t>(bytes[0]);
    case Elem::Word: return static_cast<std::int64_t>(load_u16(bytes, 0));
    case Elem::Int: return static_cast<std::int64_t>(static_cast<std::int16_t>(load_u16(bytes, 0)));
    case Elem::DWord: return static_cast<std::int64_t>(load_u32(bytes, 0));
    case Elem::DInt: return static_cast<std::int64_t>(static_cast<std::int32_t>(load_u32(bytes, 0)));
    case Elem::Real: return static_cast<double>(bits_to_float(load_u32(bytes, 0)));
    case Elem::String: return decode_plc_string(bytes);
    case Elem::Indirect: return decode_indirect(bytes);
    }
    throw Error(ErrorCode::Malformed, "bad element type");
}

std::string field_value_to_string(const FieldValue& v) {
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "1" : "0";
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        std::ostringstream out;
        out << *d;
        return out.str();
    }
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* a = std::get_if<IndirectAddress>(&v)) {
        SymbolicAddress sym;
        sym.db = a->db;
        sym.width = Width::Bit;
        sym.byte_offset = a->byte_offset();
        sym.bit = a->bit();
        return format_address(sym);
    }
    return "?";
}

} // namespace pcaad::spp
