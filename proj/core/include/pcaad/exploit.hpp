#pragma once

#include "pcaad/catalog.hpp"
#include "pcaad/enumerate.hpp"
#include "pcaad/layout.hpp"
#include "pcaad/spp/client.hpp"
#include "pcaad/spp/wire_values.hpp"

#include <optional>
#include <string>

namespace pcaad {

// One retrieved variable. Pointer-decoded results carry the resolved target
// and both raw reads.
struct ExfilResult {
    std::string field;
    spp::FieldValue value;
    bool indirect = false;
    std::optional<spp::IndirectAddress> resolved;
    Bytes pointer_raw; // the 6-byte address field, indirect only
    Bytes raw;         // bytes the value was decoded from
    int request_count = 0;
    bool sensitive = false; // string payloads; redacted unless asked for
};

enum class WriteVerdict { Persistent, RevertedByCycle, Rejected };
const char* write_verdict_name(WriteVerdict v);

struct WriteOutcome {
    WriteVerdict verdict = WriteVerdict::Rejected;
    std::uint16_t db = 0;
    std::string field;
    std::string requested;
    std::string before;
    std::string observed;
    int waited_ms = 0;
    std::string note; // rejection reason when verdict == Rejected
};

// Parse an operator-supplied literal for the field's type. Booleans accept
// 0/1/true/false; integers accept 0x hex; INDIRECT takes a DBx.DB.. address.
spp::FieldValue parse_literal_text(const ElemType& elem, const std::string& text);

// One read, exactly the field's width, decoded big-endian.
ExfilResult exfil_direct(spp::SppClient& client, const DbLayout& layout, std::uint16_t db,
                         const std::string& field);

// Two reads: the 6-byte pointer, then the declared target width at the
// resolved location (strings read capacity+2 bytes in one request).
ExfilResult exfil_indirect(spp::SppClient& client, const DbLayout& layout, std::uint16_t db,
                           const std::string& field);

// Dispatches on the field's element kind.
ExfilResult exfil_field(spp::SppClient& client, const DbLayout& layout, std::uint16_t db,
                        const std::string& field);

std::vector<ExfilResult> exfil_all(spp::SppClient& client, const DbLayout& layout,
                                   std::uint16_t db);

// Write then read back after verify_after_ms (pick >= 2 cycle times so the
// copy-in pass has definitely run). Sub-byte writes read-modify-write the
// containing byte; a cycle between those two requests can race, which the
// read-back classification absorbs.
WriteOutcome manipulate_write(spp::SppClient& client, const DbLayout& layout, std::uint16_t db,
                              const std::string& field, const spp::FieldValue& value,
                              int verify_after_ms = 30);

// Convenience: find the identified up-counter in the report and zero its CV.
WriteOutcome attack_counter_reset(spp::SppClient& client, const ScanReport& report,
                                  const Catalog& catalog, int verify_after_ms = 30);

} // namespace pcaad
