#include "pcaad/enumerate.hpp"

#include "pcaad/errors.hpp"

#include <algorithm>

#include "nlohmann/json.hpp"

namespace pcaad {

using nlohmann::ordered_json;

const char* scan_method_name(ScanMethod m) {
    switch (m) {
    case ScanMethod::ReadOnly: return "read";
    case ScanMethod::Metadata: return "metadata";
    case ScanMethod::Upload: return "upload";
    }
    return "?";
}

ScanMethod parse_scan_method(const std::string& text) {
    if (text == "read") return ScanMethod::ReadOnly;
    if (text == "metadata") return ScanMethod::Metadata;
    if (text == "upload") return ScanMethod::Upload;
    throw Error(ErrorCode::ConfigInvalid, "unknown scan method '" + text + "'");
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Identified: return "identified";
    case Verdict::Ambiguous: return "ambiguous";
    case Verdict::Unknown: return "unknown";
    }
    return "?";
}

namespace {

bool nulls_hold(const Signature& sig, std::span<const std::uint8_t> content) {
    for (const std::uint16_t off : sig.full_null_bytes)
        if (content[off] != 0) return false;
    for (const auto& [off, mask] : sig.partial_null_bits)
        if ((content[off] & mask) != 0) return false;
    return true;
}

bool known_values_hold(const Signature& sig, std::span<const std::uint8_t> content) {
    for (const KnownValue& kv : sig.known_values) {
        std::uint32_t got = 0;
        for (int i = 0; i < kv.width_bits / 8; ++i)
            got = got << 8 | content[kv.offset + i];
        if (got != kv.value) return false;
    }
    return true;
}

} // namespace

std::vector<const Signature*> match_by_content(const SignatureSet& sigs,
                                               std::span<const std::uint8_t> content) {
    std::vector<const Signature*> candidates;
    for (const Signature& s : sigs.entries)
        if (s.total_size == content.size() && nulls_hold(s, content)) candidates.push_back(&s);

    if (candidates.size() > 1) {
        std::vector<const Signature*> strict;
        for (const Signature* s : candidates)
            if (known_values_hold(*s, content)) strict.push_back(s);
        if (!strict.empty()) candidates = std::move(strict);
    }
    return candidates;
}

Signature provisional_signature(std::uint16_t db, std::span<const std::uint8_t> content) {
    Signature sig;
    sig.fb_name = "CUSTOM_DB" + std::to_string(db);
    sig.family = "CUSTOM";
    sig.header = "CUSTOM";
    sig.total_size = static_cast<std::uint16_t>(content.size());
    for (std::size_t i = 0; i < content.size(); ++i)
        if (content[i] == 0) sig.full_null_bytes.push_back(static_cast<std::uint16_t>(i));
    sig.provisional = true;
    return sig;
}

BlockFinding classify_content(const SignatureSet& sigs, std::uint16_t db, Bytes content) {
    BlockFinding f;
    f.db = db;
    f.size = static_cast<std::uint16_t>(content.size());
    const auto candidates = match_by_content(sigs, content);
    for (const Signature* s : candidates) f.candidates.push_back(s->fb_name);
    if (candidates.size() == 1) {
        f.verdict = Verdict::Identified;
        f.family = candidates.front()->family;
        f.header = candidates.front()->header;
    } else if (candidates.size() > 1) {
        f.verdict = Verdict::Ambiguous;
    } else {
        f.verdict = Verdict::Unknown;
        f.provisional = provisional_signature(db, content);
    }
    f.content = std::move(content);
    return f;
}

std::vector<std::uint16_t> discover_by_probe(spp::SppClient& client,
                                             std::uint16_t probe_limit) {
    std::vector<std::uint16_t> found;
    for (std::uint16_t db = 1; db <= probe_limit; ++db) {
        try {
            client.read_bytes(db, 0, 1);
            found.push_back(db);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BlockNotFound) throw;
        }
    }
    return found;
}

Bytes fetch_block_content(spp::SppClient& client, std::uint16_t db) {
    constexpr std::uint32_t kChunk = 64;
    Bytes content;
    std::uint32_t edge = 0; // first offset where a full chunk no longer fits
    while (edge + kChunk <= 0x10000) {
        try {
            const Bytes chunk = client.read_bytes(db, static_cast<std::uint16_t>(edge), kChunk);
            content.insert(content.end(), chunk.begin(), chunk.end());
            edge += kChunk;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::OutOfRange) throw;
            break;
        }
    }

    // size is in [edge, edge + kChunk); bisect with 1-byte probes
    std::uint32_t lo = edge, hi = edge + kChunk;
    while (hi - lo > 1) {
        const std::uint32_t mid = (lo + hi) / 2;
        try {
            client.read_bytes(db, static_cast<std::uint16_t>(mid - 1), 1);
            lo = mid; // size >= mid
        } catch (const Error& e) {
            if (e.code() != ErrorCode::OutOfRange) throw;
            hi = mid;
        }
    }
    const std::uint32_t size = lo;

    if (size > content.size()) {
        const auto tail =
            client.read_bytes(db, static_cast<std::uint16_t>(content.size()),
                              static_cast<std::uint16_t>(size - content.size()));
        content.insert(content.end(), tail.begin(), tail.end());
    }
    return content;
}

namespace {

BlockFinding finding_from_meta(const SignatureSet& sigs, const BlockMeta& meta) {
    BlockFinding f;
    f.db = meta.id.number;
    f.size = meta.body_length;
    f.family = meta.family;
    f.header = meta.header;
    for (const Signature& s : sigs.entries)
        if (s.total_size == meta.body_length && s.family == meta.family &&
            s.header == meta.header)
            f.candidates.push_back(s.fb_name);
    if (f.candidates.size() == 1) f.verdict = Verdict::Identified;
    else if (f.candidates.size() > 1) f.verdict = Verdict::Ambiguous;
    else f.verdict = Verdict::Unknown;
    return f;
}

} // namespace

ScanReport scan(spp::SppClient& client, const SignatureSet& sigs, const ScanOptions& options) {
    ScanReport report;
    report.method = options.method;
    const std::uint64_t before = client.total_requests();

    if (options.method == ScanMethod::ReadOnly) {
        for (const std::uint16_t db : discover_by_probe(client, options.probe_limit))
            report.findings.push_back(classify_content(sigs, db, fetch_block_content(client, db)));
    } else {
        for (const auto& [id, size] : client.list_blocks()) {
            if (id.kind != BlockClass::DB) continue;
            if (options.method == ScanMethod::Metadata) {
                report.findings.push_back(finding_from_meta(sigs, client.get_block_info(id.number)));
            } else {
                const spp::BlockImage image = client.upload_block(id.number);
                BlockFinding f = finding_from_meta(sigs, image.meta);
                if (f.verdict == Verdict::Unknown) {
                    // metadata told us nothing; fall back to the content pipeline
                    BlockFinding byContent = classify_content(sigs, id.number, image.body);
                    byContent.family = image.meta.family;
                    byContent.header = image.meta.header;
                    f = std::move(byContent);
                } else {
                    f.content = image.body;
                }
                report.findings.push_back(std::move(f));
            }
        }
    }

    std::sort(report.findings.begin(), report.findings.end(),
              [](const BlockFinding& a, const BlockFinding& b) { return a.db < b.db; });
    report.requests = client.total_requests() - before;
    return report;
}

std::string scan_report_to_json(const ScanReport& report) {
    ordered_json doc;
    doc["method"] = scan_method_name(report.method);
    if (!report.target.empty()) doc["target"] = report.target;
    doc["requests"] = report.requests;
    doc["findings"] = ordered_json::array();
    for (const BlockFinding& f : report.findings) {
        ordered_json jf;
        jf["db"] = f.db;
        jf["size"] = f.size;
        jf["verdict"] = verdict_name(f.verdict);
        jf["candidates"] = f.candidates;
        if (!f.family.empty()) jf["family"] = f.family;
        if (!f.header.empty()) jf["header"] = f.header;
        if (f.provisional) jf["provisional_signature"] = f.provisional->fb_name;
        doc["findings"].push_back(std::move(jf));
    }
    return doc.dump(2) + "\n";
}

} // namespace pcaad
