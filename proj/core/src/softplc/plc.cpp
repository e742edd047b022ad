#include "pcaad/softplc/plc.hpp"

#include "pcaad/errors.hpp"

#include <algorithm>
#include <chrono>

namespace pcaad::softplc {

namespace {

constexpr std::array<std::int32_t, 10> kValidBauds = {300,   600,   1200,  2400,  4800,
                                                      9600,  19200, 38400, 57600, 115200};
constexpr std::uint16_t kStatusBadBaud = 0x8180;

// FB block numbers are not configured anywhere, so derive them from catalog
// order (1-based) to give BlockInfo a stable associated_fb.
std::uint16_t fb_number(const Catalog& catalog, const std::string& fb_name) {
    for (std::size_t i = 0; i < catalog.decls.size(); ++i)
        if (catalog.decls[i].fb_name == fb_name) return static_cast<std::uint16_t>(i + 1);
    return 0;
}

} // namespace

Plc::Plc(PlcConfig cfg) : cfg_(std::move(cfg)) {
    for (const auto& g : cfg_.global_dbs) {
        DataBlock block;
        block.meta.id = BlockId{BlockClass::DB, g.db};
        block.meta.body_length = static_cast<std::uint16_t>(g.bytes.size());
        block.bytes = g.bytes;
        blocks_.emplace(g.db, std::move(block));
    }

    for (const auto& ic : cfg_.instances) {
        const FbDecl* decl = cfg_.catalog.find(ic.fb_name);
        if (!decl) throw Error(ErrorCode::ConfigInvalid, "unknown FB " + ic.fb_name);

        Instance inst;
        inst.cfg = ic;
        inst.layout = compile_layout(*decl);

        DataBlock block;
        block.meta.id = BlockId{BlockClass::DB, ic.db};
        block.meta.family = decl->family;
        block.meta.header = decl->header;
        block.meta.body_length = inst.layout.total_size;
        block.meta.associated_fb = BlockId{BlockClass::FB, fb_number(cfg_.catalog, ic.fb_name)};
        block.author = "LIBRARY";
        block.bytes.assign(inst.layout.total_size, 0);

        // Declaration defaults are written once, here. Bound inputs get
        // overwritten again every cycle.
        for (const auto& p : inst.layout.placements) {
            if (std::holds_alternative<std::monostate>(p.default_value)) continue;
            if (p.elem.kind == Elem::Bool) {
                if (std::get<bool>(p.default_value))
                    block.bytes[p.byte_offset] |= static_cast<std::uint8_t>(1u << p.bit);
            } else {
                const Bytes encoded = spp::encode_field_literal(p.elem, p.default_value);
                std::copy(encoded.begin(), encoded.end(), block.bytes.begin() + p.byte_offset);
            }
        }

        blocks_.emplace(ic.db, std::move(block));
        instances_.push_back(std::move(inst));
    }
}

DataBlock& Plc::block_at(std::uint16_t db) {
    auto it = blocks_.find(db);
    if (it == blocks_.end()) throw Error(ErrorCode::BlockNotFound, "DB" + std::to_string(db));
    return it->second;
}

const DataBlock& Plc::block_at(std::uint16_t db) const {
    auto it = blocks_.find(db);
    if (it == blocks_.end()) throw Error(ErrorCode::BlockNotFound, "DB" + std::to_string(db));
    return it->second;
}

Bytes Plc::read(std::uint16_t db, std::uint32_t offset, std::uint32_t count) const {
    std::lock_guard lock(mu_);
    const DataBlock& block = block_at(db);
    if (offset + count > block.bytes.size())
        throw Error(ErrorCode::OutOfRange, "DB" + std::to_string(db) + " offset " +
                                               std::to_string(offset) + "+" + std::to_string(count));
    return Bytes(block.bytes.begin() + offset, block.bytes.begin() + offset + count);
}

void Plc::write(std::uint16_t db, std::uint32_t offset, std::span<const std::uint8_t> data) {
    std::lock_guard lock(mu_);
    DataBlock& block = block_at(db);
    if (offset + data.size() > block.bytes.size())
        throw Error(ErrorCode::OutOfRange, "DB" + std::to_string(db) + " offset " +
                                               std::to_string(offset) + "+" + std::to_string(data.size()));
    std::copy(data.begin(), data.end(), block.bytes.begin() + offset);
}

spp::BlockImage Plc::upload(std::uint16_t db) const {
    std::lock_guard lock(mu_);
    const DataBlock& block = block_at(db);
    spp::BlockImage image;
    image.meta = block.meta;
    image.meta.associated_fb.reset(); // not part of the image format
    image.author = block.author;
    image.body = block.bytes;
    return image;
}

BlockMeta Plc::block_info(std::uint16_t db) const {
    std::lock_guard lock(mu_);
    return block_at(db).meta;
}

std::vector<std::pair<BlockId, std::uint16_t>> Plc::list_blocks() const {
    std::lock_guard lock(mu_);
    std::vector<std::pair<BlockId, std::uint16_t>> out;
    out.reserve(blocks_.size());
    for (const auto& [db, block] : blocks_)
        out.emplace_back(block.meta.id, static_cast<std::uint16_t>(block.bytes.size()));
    return out;
}

const DbLayout* Plc::layout_of(std::uint16_t db) const {
    for (const auto& inst : instances_)
        if (inst.cfg.db == db) return &inst.layout;
    return nullptr;
}

bool Plc::get_bit(const DataBlock& block, std::uint32_t byte, std::uint8_t bit) {
    return (block.bytes[byte] >> bit & 1) != 0;
}

void Plc::put_bit(DataBlock& block, std::uint32_t byte, std::uint8_t bit, bool v) {
    if (v)
        block.bytes[byte] |= static_cast<std::uint8_t>(1u << bit);
    else
        block.bytes[byte] &= static_cast<std::uint8_t>(~(1u << bit));
}

void Plc::copy_bindings(Instance& inst, DataBlock& block) {
    for (const auto& b : inst.cfg.bindings) {
        const Placement& p = inst.layout.at(b.field);
        if (b.mode == BindingMode::DirectConstant) {
            if (p.elem.kind == Elem::Bool) {
                put_bit(block, p.byte_offset, p.bit, std::get<bool>(b.constant));
            } else {
                const Bytes encoded = spp::encode_field_literal(p.elem, b.constant);
                std::copy(encoded.begin(), encoded.end(), block.bytes.begin() + p.byte_offset);
            }
        } else if (b.mode == BindingMode::GlobalVb) {
            const DataBlock& src = block_at(b.source.db);
            if (b.source.width == Width::Bit) {
                put_bit(block, p.byte_offset, p.bit,
                        get_bit(src, b.source.byte_offset, b.source.bit));
            } else {
                const unsigned w = width_bytes(b.source.width);
                std::copy_n(src.bytes.begin() + b.source.byte_offset, w,
                            block.bytes.begin() + p.byte_offset);
            }
        }
    }
}

void Plc::behavior_modbus(const Instance& inst, DataBlock& block) {
    const Placement& baud = inst.layout.at("BAUD");
    const auto value = static_cast<std::int32_t>(load_u32(block.bytes, baud.byte_offset));
    const bool valid = std::find(kValidBauds.begin(), kValidBauds.end(), value) != kValidBauds.end();

    const Placement& done = inst.layout.at("DONE");
    const Placement& error = inst.layout.at("ERROR");
    const Placement& status = inst.layout.at("STATUS");
    put_bit(block, done.byte_offset, done.bit, valid);
    put_bit(block, error.byte_offset, error.bit, !valid);
    store_u16(block.bytes.data() + status.byte_offset, valid ? 0 : kStatusBadBaud);
}

void Plc::behavior_as_mail(const Instance& inst, DataBlock& block) {
    // A credential pointer is good when it decodes, its DB exists, and the
    // target holds a well-formed string.
    auto pointer_ok = [&](const std::string& field) {
        const Placement& p = inst.layout.at(field);
        spp::IndirectAddress addr;
        try {
            addr = spp::decode_indirect({block.bytes.data() + p.byte_offset, spp::kIndirectSize});
        } catch (const Error&) {
            return false; // zeroed or foreign area byte
        }
        auto it = blocks_.find(addr.db);
        if (it == blocks_.end()) return false; // dangling
        const Bytes& target = it->second.bytes;
        const std::uint32_t off = addr.byte_offset();
        if (off + 2 > target.size()) return false;
        const std::uint8_t cur = target[off + 1];
        if (cur > target[off]) return false;
        if (off + 2u + cur > target.size()) return false;
        for (std::uint32_t i = 0; i < cur; ++i)
            if (target[off + 2 + i] > 0x7f) return false;
        return true;
    };

    const bool ok = pointer_ok("USERNAME") && pointer_ok("PASSWORD");
    const Placement& done = inst.layout.at("DONE");
    const Placement& error = inst.layout.at("ERROR");
    put_bit(block, done.byte_offset, done.bit, ok);
    put_bit(block, error.byte_offset, error.bit, !ok);
}

void Plc::behavior_count_up(Instance& inst, DataBlock& block) {
    const Placement& cu = inst.layout.at("CU");
    const Placement& r = inst.layout.at("R");
    const Placement& pv = inst.layout.at("PV");
    const Placement& q = inst.layout.at("Q");
    const Placement& cv = inst.layout.at("CV");

    const bool cu_now = get_bit(block, cu.byte_offset, cu.bit);
    auto count = static_cast<std::int16_t>(load_u16(block.bytes, cv.byte_offset));
    if (cu_now && !inst.prev_cu && count < 32767) ++count;
    if (get_bit(block, r.byte_offset, r.bit)) count = 0;
    inst.prev_cu = cu_now;

    store_u16(block.bytes.data() + cv.byte_offset, static_cast<std::uint16_t>(count));
    const auto preset = static_cast<std::int16_t>(load_u16(block.bytes, pv.byte_offset));
    put_bit(block, q.byte_offset, q.bit, count >= preset);
}

void Plc::behavior_smc(const Instance& inst, DataBlock& block) {
    // Deliberately reads the whole 16-bit block that holds IN_BIT0, so null
    // bits in bytes 0..1 are part of the comparison.
    const Placement& in0 = inst.layout.at("IN_BIT0");
    const std::uint32_t base = in0.byte_offset / 2 * 2;
    const std::uint16_t input_block = load_u16(block.bytes, base);

    const Placement& mask = inst.layout.at("MASK");
    const std::uint16_t want = load_u16(block.bytes, mask.byte_offset);

    const Placement& out = inst.layout.at("OUT");
    put_bit(block, out.byte_offset, out.bit, input_block == want);
}

void Plc::run_behavior(Instance& inst, DataBlock& block) {
    switch (inst.cfg.behavior) {
    case Behavior::Passive: break;
    case Behavior::ModbusCommLoad: behavior_modbus(inst, block); break;
    case Behavior::AsMail: behavior_as_mail(inst, block); break;
    case Behavior::IecCountUp: behavior_count_up(inst, block); break;
    case Behavior::Smc: behavior_smc(inst, block); break;
    }
}

void Plc::execute_cycle() {
    const auto start = std::chrono::steady_clock::now();
    std::lock_guard lock(mu_);
    for (auto& inst : instances_) {
        DataBlock& block = blocks_.at(inst.cfg.db);
        copy_bindings(inst, block);
        run_behavior(inst, block);
    }
    ++stats_.cycle_count;
    stats_.last_cycle_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

CycleStats Plc::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

} // namespace pcaad::softplc
