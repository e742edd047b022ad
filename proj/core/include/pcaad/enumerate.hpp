#pragma once

#include "pcaad/signature.hpp"
#include "pcaad/spp/client.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pcaad {

// How much the scanner is allowed to ask for. ReadOnly stays within plain
// reads; Metadata uses the block directory; Upload pulls whole images.
enum class ScanMethod { ReadOnly, Metadata, Upload };
const char* scan_method_name(ScanMethod m);
ScanMethod parse_scan_method(const std::string& text); // "read" | "metadata" | "upload"

enum class Verdict { Identified, Ambiguous, Unknown };
const char* verdict_name(Verdict v);

struct BlockFinding {
    std::uint16_t db = 0;
    std::uint16_t size = 0;
    Verdict verdict = Verdict::Unknown;
    std::vector<std::string> candidates; // fb names surviving the match pipeline
    std::string family;                  // visible with Metadata/Upload, inferred otherwise
    std::string header;
    Bytes content;                      // ReadOnly and Upload
    std::optional<Signature> provisional; // generated for Unknown blocks under ReadOnly
};

struct ScanOptions {
    ScanMethod method = ScanMethod::ReadOnly;
    std::uint16_t probe_limit = 64; // DB numbers 1..limit are probed when not listing
};

struct ScanReport {
    ScanMethod method = ScanMethod::ReadOnly;
    std::string target;
    std::vector<BlockFinding> findings;
    std::uint64_t requests = 0; // wire requests this scan issued
};

// Match pipeline over raw content: size, then full null bytes, then partial
// null bits; known values only break ties and never reduce the set to zero.
std::vector<const Signature*> match_by_content(const SignatureSet& sigs,
                                               std::span<const std::uint8_t> content);

BlockFinding classify_content(const SignatureSet& sigs, std::uint16_t db,
                              Bytes content);

// Stand-in signature for a block nothing matched: observed zero bytes become
// the null map. Marked provisional so it is never mistaken for library truth.
Signature provisional_signature(std::uint16_t db, std::span<const std::uint8_t> content);

// Existence probe over DB 1..probe_limit using 1-byte reads.
std::vector<std::uint16_t> discover_by_probe(spp::SppClient& client,
                                             std::uint16_t probe_limit);

// Sizes and fetches a block with plain reads only: 64-byte chunks until the
// edge, a bounded bisection on the last chunk, then the tail. Costs at most
// ceil(size/64) + 7 requests.
Bytes fetch_block_content(spp::SppClient& client, std::uint16_t db);

ScanReport scan(spp::SppClient& client, const SignatureSet& sigs,
                const ScanOptions& options = {});

std::string scan_report_to_json(const ScanReport& report);

} // namespace pcaad
