#include "pcaad/catalog.hpp"

#include "pcaad/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace pcaad {

using ordered_json = nlohmann::ordered_json;

const char* behavior_name(Behavior b) {
    switch (b) {
    case Behavior::Passive: return "Passive";
    case Behavior::ModbusCommLoad: return "ModbusCommLoad";
    case Behavior::AsMail: return "AsMail";
    case Behavior::IecCountUp: return "IecCountUp";
    case Behavior::Smc: return "Smc";
    }
    return "?";
}

Behavior parse_behavior(const std::string& text) {
    if (text == "Passive") return Behavior::Passive;
    if (text == "ModbusCommLoad") return Behavior::ModbusCommLoad;
    if (text == "AsMail") return Behavior::AsMail;
    if (text == "IecCountUp") return Behavior::IecCountUp;
    if (text == "Smc") return Behavior::Smc;
    throw Error(ErrorCode::ConfigInvalid, "bad behavior '" + text + "'");
}

const FbDecl* Catalog::find(const std::string& fb_name) const {
    for (const auto& d : decls)
        if (d.fb_name == fb_name) return &d;
    return nullptr;
}

DbLayout compile_layout(const FbDecl& decl) {
    DbLayout layout = compile_layout(decl.fields);
    layout.fb_name = decl.fb_name;
    layout.family = decl.family;
    layout.header = decl.header;
    layout.whole_block_sensitive = decl.whole_block_sensitive;
    return layout;
}

SignatureSet build_signature_set(const Catalog& catalog, SignatureSource source) {
    std::vector<DbLayout> layouts;
    layouts.reserve(catalog.decls.size());
    for (const auto& d : catalog.decls) layouts.push_back(compile_layout(d));
    return build_signature_set(layouts, source);
}

namespace {

FieldSpec field(std::string name, ElemType elem, Section section, Literal def = {}) {
    FieldSpec f;
    f.name = std::move(name);
    f.elem = elem;
    f.section = section;
    f.default_value = std::move(def);
    return f;
}

FieldSpec pointer(std::string name, Section section) {
    FieldSpec f = field(std::move(name), ElemType::simple(Elem::Indirect), section);
    f.indirect_target = ElemType::string(); // pointers in this library target strings
    return f;
}

constexpr auto kBool = Elem::Bool;
constexpr auto kWord = Elem::Word;
constexpr auto kInt = Elem::Int;
constexpr auto kDWord = Elem::DWord;
constexpr auto kDInt = Elem::DInt;
constexpr auto kReal = Elem::Real;

Catalog make_builtin() {
    Catalog c;

    // Serial gateway configurator. REQ sits alone in its 16-bit block, the
    // classic one-bit-plus-15-null shape.
    FbDecl modbus;
    modbus.fb_name = "MODBUS_COMM_LOAD";
    modbus.family = "MODBUS";
    modbus.header = "MBCOMLOA";
    modbus.behavior = Behavior::ModbusCommLoad;
    modbus.fields = {
        field("REQ", ElemType::simple(kBool), Section::Input),
        field("PORT", ElemType::simple(kWord), Section::Input),
        field("BAUD", ElemType::simple(kDInt), Section::Input, std::int64_t{9600}),
        field("PARITY", ElemType::simple(kWord), Section::Input),
        field("FLOW_CTRL", ElemType::simple(kWord), Section::Input),
        field("RTS_ON_DLY", ElemType::simple(kWord), Section::Input),
        field("RTS_OFF_DLY", ElemType::simple(kWord), Section::Input),
        field("RESP_TO", ElemType::simple(kWord), Section::Input, std::int64_t{1000}),
        field("DONE", ElemType::simple(kBool), Section::Output),
        field("ERROR", ElemType::simple(kBool), Section::Output),
        field("STATUS", ElemType::simple(kWord), Section::Output),
    };

    // Mail client; credentials arrive as area pointers into a global VB.
    FbDecl mail;
    mail.fb_name = "AS_MAIL";
    mail.family = "COMM";
    mail.header = "ASMAIL";
    mail.behavior = Behavior::AsMail;
    mail.fields = {
        field("REQ", ElemType::simple(kBool), Section::Input),
        field("ADDR_MAIL_SERVER", ElemType::simple(kDWord), Section::Input),
        pointer("USERNAME", Section::Input),
        pointer("PASSWORD", Section::Input),
        pointer("SUBJECT", Section::Input),
        pointer("TEXT", Section::Input),
        field("DONE", ElemType::simple(kBool), Section::Output),
        field("ERROR", ElemType::simple(kBool), Section::Output),
        field("STATUS", ElemType::simple(kWord), Section::Output),
    };

    // IEC up counter.
    FbDecl counter;
    counter.fb_name = "IEC_CU";
    counter.family = "IEC";
    counter.header = "IECCU";
    counter.behavior = Behavior::IecCountUp;
    counter.fields = {
        field("CU", ElemType::simple(kBool), Section::Input),
        field("R", ElemType::simple(kBool), Section::Input),
        field("PV", ElemType::simple(kInt), Section::Input),
        field("Q", ElemType::simple(kBool), Section::Output),
        field("CV", ElemType::simple(kInt), Section::Output),
    };

    // Writes data to a remote CPU. Passive here: data shape only.
    FbDecl put;
    put.fb_name = "PUT";
    put.family = "COMM";
    put.header = "PUT";
    put.fields = {
        field("REQ", ElemType::simple(kBool), Section::Input),
        field("ID", ElemType::simple(kWord), Section::Input),
        pointer("ADDR_1", Section::Input),
        pointer("SD_1", Section::Input),
        field("DONE", ElemType::simple(kBool), Section::Output),
        field("ERROR", ElemType::simple(kBool), Section::Output),
        field("STATUS", ElemType::simple(kWord), Section::Output),
    };

    // Continuous PID controller. Large block, several non-zero defaults.
    FbDecl pid;
    pid.fb_name = "CONT_C";
    pid.family = "PID";
    pid.header = "CONT_C";
    pid.fields = {
        field("COM_RST", ElemType::simple(kBool), Section::Input),
        field("MAN_ON", ElemType::simple(kBool), Section::Input, true),
        field("PVPER_ON", ElemType::simple(kBool), Section::Input),
        field("P_SEL", ElemType::simple(kBool), Section::Input, true),
        field("I_SEL", ElemType::simple(kBool), Section::Input, true),
        field("D_SEL", ElemType::simple(kBool), Section::Input),
        field("CYCLE", ElemType::simple(kDWord), Section::Input, std::int64_t{1000}),
        field("SP_INT", ElemType::simple(kReal), Section::Input),
        field("PV_IN", ElemType::simple(kReal), Section::Input),
        field("GAIN", ElemType::simple(kReal), Section::Input, 2.0),
        field("TI", ElemType::simple(kDWord), Section::Input, std::int64_t{20000}),
        field("TD", ElemType::simple(kDWord), Section::Input, std::int64_t{10000}),
        field("LMN_HLM", ElemType::simple(kReal), Section::Input, 100.0),
        field("LMN_LLM", ElemType::simple(kReal), Section::Input),
        field("LMN", ElemType::simple(kReal), Section::Output),
        field("QLMN_HLM", ElemType::simple(kBool), Section::Output),
        field("QLMN_LLM", ElemType::simple(kBool), Section::Output),
    };

    // Safety door monitor. Nine packed BOOLs spill into the second byte.
    FbDecl door;
    door.fb_name = "SFDOOR";
    door.family = "SAFETY";
    door.header = "SFDOOR";
    door.fields = {
        field("IN1", ElemType::simple(kBool), Section::Input),
        field("IN2", ElemType::simple(kBool), Section::Input),
        field("QBAD_IN1", ElemType::simple(kBool), Section::Input),
        field("QBAD_IN2", ElemType::simple(kBool), Section::Input),
        field("OPEN_NEC", ElemType::simple(kBool), Section::Input, true),
        field("ACK_NEC", ElemType::simple(kBool), Section::Input, true),
        field("ACK", ElemType::simple(kBool), Section::Input),
        field("Q", ElemType::simple(kBool), Section::Output),
        field("ACK_REQ", ElemType::simple(kBool), Section::Output),
        field("DIAG", ElemType::simple(Elem::Byte), Section::Output),
    };

    // Step mask comparator: matches up to 16 input bits against MASK. Only
    // IN_BIT0 is declared, but the logic reads the whole 16-bit block, so
    // its null bits are load-bearing.
    FbDecl smc;
    smc.fb_name = "SMC";
    smc.family = "BASIC";
    smc.header = "SMC";
    smc.behavior = Behavior::Smc;
    smc.whole_block_sensitive = true;
    smc.fields = {
        field("IN_BIT0", ElemType::simple(kBool), Section::Input),
        field("MASK", ElemType::simple(kWord), Section::Input, std::int64_t{1}),
        field("OUT", ElemType::simple(kBool), Section::Output),
    };

    c.decls = {modbus, mail, counter, put, pid, door, smc};
    return c;
}

} // namespace

const Catalog& builtin_catalog() {
    static const Catalog catalog = make_builtin();
    return catalog;
}

namespace {

ordered_json literal_to_json(const Literal& lit) {
    if (const auto* i = std::get_if<std::int64_t>(&lit)) return *i;
    if (const auto* d = std::get_if<double>(&lit)) return *d;
    if (const auto* b = std::get_if<bool>(&lit)) return *b;
    if (const auto* s = std::get_if<std::string>(&lit)) return *s;
    return nullptr;
}

Literal literal_from_json(const nlohmann::json& j, const ElemType& elem, const std::string& where) {
    switch (elem.kind) {
    case Elem::Bool:
        if (j.is_boolean()) return j.get<bool>();
        if (j.is_number_integer()) {
            const auto v = j.get<std::int64_t>();
            if (v == 0 || v == 1) return v != 0;
        }
        throw Error(ErrorCode::ConfigInvalid, where + ": BOOL default must be true/false");
    case Elem::Byte:
    case Elem::Word:
    case Elem::DWord:
    case Elem::Int:
    case Elem::DInt: {
        if (!j.is_number_integer())
            throw Error(ErrorCode::ConfigInvalid, where + ": integer default required");
        const auto v = j.get<std::int64_t>();
        const unsigned w = width_bits(elem);
        const bool is_signed = elem.kind == Elem::Int || elem.kind == Elem::DInt;
        const std::int64_t lo = is_signed ? -(std::int64_t{1} << (w - 1)) : 0;
        const std::int64_t hi = is_signed ? (std::int64_t{1} << (w - 1)) - 1 : (std::int64_t{1} << w) - 1;
        if (v < lo || v > hi)
            throw Error(ErrorCode::ConfigInvalid, where + ": default out of range for " + elem_type_name(elem));
        return v;
    }
    case Elem::Real:
        if (!j.is_number()) throw Error(ErrorCode::ConfigInvalid, where + ": numeric default required");
        return j.get<double>();
    case Elem::String: {
        if (!j.is_string()) throw Error(ErrorCode::ConfigInvalid, where + ": string default required");
        const auto s = j.get<std::string>();
        if (s.size() > elem.capacity)
            throw Error(ErrorCode::ConfigInvalid, where + ": default longer than capacity");
        return s;
    }
    case Elem::Indirect: {
        if (!j.is_string()) throw Error(ErrorCode::ConfigInvalid, where + ": address string required");
        const auto s = j.get<std::string>();
        parse_address(s); // validity check only
        return s;
    }
    }
    throw Error(ErrorCode::ConfigInvalid, where + ": bad default");
}

} // namespace

std::string catalog_to_json(const Catalog& catalog) {
    ordered_json out = ordered_json::array();
    for (const auto& d : catalog.decls) {
        ordered_json jd;
        jd["fb_name"] = d.fb_name;
        jd["family"] = d.family;
        jd["header"] = d.header;
        if (d.behavior != Behavior::Passive) jd["behavior"] = behavior_name(d.behavior);
        if (d.whole_block_sensitive) jd["whole_block_sensitive"] = true;
        ordered_json fields = ordered_json::array();
        for (const auto& f : d.fields) {
            ordered_json jf;
            jf["name"] = f.name;
            jf["type"] = elem_type_name(f.elem);
            jf["section"] = section_name(f.section);
            if (!std::holds_alternative<std::monostate>(f.default_value))
                jf["default"] = literal_to_json(f.default_value);
            if (f.indirect_target) jf["target"] = elem_type_name(*f.indirect_target);
            fields.push_back(jf);
        }
        jd["fields"] = fields;
        out.push_back(jd);
    }
    return out.dump(2) + "\n";
}

Catalog catalog_from_json(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("catalog: ") + e.what());
    }
    if (!root.is_array()) throw Error(ErrorCode::ConfigInvalid, "catalog: top level must be an array");

    Catalog c;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const auto& jd = root[i];
        const std::string where = "catalog[" + std::to_string(i) + "]";
        try {
            FbDecl d;
            d.fb_name = jd.at("fb_name").get<std::string>();
            d.family = jd.at("family").get<std::string>();
            d.header = jd.at("header").get<std::string>();
            if (d.family.size() > 8 || d.header.size() > 8)
                throw Error(ErrorCode::ConfigInvalid, where + ": family/header limited to 8 chars");
            if (jd.contains("behavior")) d.behavior = parse_behavior(jd.at("behavior").get<std::string>());
            d.whole_block_sensitive = jd.value("whole_block_sensitive", false);
            for (std::size_t k = 0; k < jd.at("fields").size(); ++k) {
                const auto& jf = jd.at("fields")[k];
                const std::string fwhere = where + ".fields[" + std::to_string(k) + "]";
                FieldSpec f;
                f.name = jf.at("name").get<std::string>();
                f.elem = parse_elem_type(jf.at("type").get<std::string>());
                f.section = parse_section(jf.at("section").get<std::string>());
                if (jf.contains("default"))
                    f.default_value = literal_from_json(jf.at("default"), f.elem, fwhere);
                if (jf.contains("target")) {
                    if (f.elem.kind != Elem::Indirect)
                        throw Error(ErrorCode::ConfigInvalid, fwhere + ": target only valid on INDIRECT");
                    f.indirect_target = parse_elem_type(jf.at("target").get<std::string>());
                } else if (f.elem.kind == Elem::Indirect) {
                    f.indirect_target = ElemType::string();
                }
                d.fields.push_back(std::move(f));
            }
            c.decls.push_back(std::move(d));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ConfigInvalid, where + ": " + e.what());
        }
    }
    return c;
}

void save_catalog(const Catalog& catalog, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path);
    out << catalog_to_json(catalog);
}

Catalog load_catalog(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return catalog_from_json(text);
}

} // namespace pcaad
