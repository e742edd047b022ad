#pragma once

#include "pcaad/softplc/config.hpp"
#include "pcaad/spp/wire_values.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

namespace pcaad::softplc {

struct DataBlock {
    BlockMeta meta;
    std::string author;
    Bytes bytes;
};

struct CycleStats {
    std::uint64_t cycle_count = 0;
    double last_cycle_ms = 0.0;
};

// Block store plus cyclic executor. All accessors serialize on one mutex, so
// protocol requests see atomic snapshots between cycles.
class Plc {
  public:
    explicit Plc(PlcConfig cfg);

    // Request-level operations; feature gating is the server's concern.
    Bytes read(std::uint16_t db, std::uint32_t offset, std::uint32_t count) const;
    void write(std::uint16_t db, std::uint32_t offset, std::span<const std::uint8_t> data);
    spp::BlockImage upload(std::uint16_t db) const;
    BlockMeta block_info(std::uint16_t db) const;
    std::vector<std::pair<BlockId, std::uint16_t>> list_blocks() const;

    // One scan: copy bound inputs, then run each instance behavior, in
    // configuration order.
    void execute_cycle();

    CycleStats stats() const;
    const PlcConfig& config() const { return cfg_; }
    const DbLayout* layout_of(std::uint16_t db) const; // nullptr for global VBs

  private:
    struct Instance {
        FbInstanceConfig cfg;
        DbLayout layout;
        bool prev_cu = false; // IecCountUp edge state, kept off the block
    };

    DataBlock& block_at(std::uint16_t db);
    const DataBlock& block_at(std::uint16_t db) const;
    void copy_bindings(Instance& inst, DataBlock& block);
    void run_behavior(Instance& inst, DataBlock& block);

    void behavior_modbus(const Instance& inst, DataBlock& block);
    void behavior_as_mail(const Instance& inst, DataBlock& block);
    void behavior_count_up(Instance& inst, DataBlock& block);
    void behavior_smc(const Instance& inst, DataBlock& block);

    // raw bit/word helpers on block bytes
    static bool get_bit(const DataBlock& block, std::uint32_t byte, std::uint8_t bit);
    static void put_bit(DataBlock& block, std::uint32_t byte, std::uint8_t bit, bool v);

    PlcConfig cfg_;
    std::map<std::uint16_t, DataBlock> blocks_;
    std::vector<Instance> instances_;
    CycleStats stats_;
    mutable std::mutex mu_;
};

} // namespace pcaad::softplc
