#include "pcaad/catalog.hpp"
#include "pcaad/enumerate.hpp"
#include "pcaad/errors.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

namespace pcaad {
namespace {

using spp::Opcode;
using test::LivePlc;

const char* kSizesConfig = R"({
  "global_dbs": [
    { "db": 1, "size": 552 },
    { "db": 2, "size": 2 },
    { "db": 3, "size": 64 },
    { "db": 4, "size": 128 }
  ],
  "fb_instances": [ { "fb": "MODBUS_COMM_LOAD", "db": 5 } ]
})";

Bytes fresh_block(const char* fb) {
    const DbLayout layout = compile_layout(*builtin_catalog().find(fb));
    Bytes content(layout.total_size, 0);
    for (const auto& p : layout.placements) {
        if (std::holds_alternative<std::monostate>(p.default_value)) continue;
        if (p.elem.kind == Elem::Bool) {
            if (std::get<bool>(p.default_value)) content[p.byte_offset] |= 1u << p.bit;
        } else {
            const Bytes enc = spp::encode_field_literal(p.elem, p.default_value);
            std::copy(enc.begin(), enc.end(), content.begin() + p.byte_offset);
        }
    }
    return content;
}

TEST(Match, SizeGateComesFirst) {
    const SignatureSet sigs = build_signature_set(builtin_catalog());
    Bytes content = fresh_block("MODBUS_COMM_LOAD");

    auto hits = match_by_content(sigs, content);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0]->fb_name, "MODBUS_COMM_LOAD");

    content.resize(24, 0); // wrong size, everything else identical
    EXPECT_TRUE(match_by_content(sigs, content).empty());
}

TEST(Match, NullViolationDisqualifies) {
    const SignatureSet sigs = build_signature_set(builtin_catalog());
    Bytes content = fresh_block("MODBUS_COMM_LOAD");

    content[1] = 0x01; // full null byte
    EXPECT_TRUE(match_by_content(sigs, content).empty());

    content = fresh_block("MODBUS_COMM_LOAD");
    content[0] |= 0x80; // partial null bit above REQ
    EXPECT_TRUE(match_by_content(sigs, content).empty());

    // Bits that belong to fields are free to vary.
    content = fresh_block("MODBUS_COMM_LOAD");
    content[0] |= 0x01; // REQ itself
    content[15] = 0x42; // RTS_OFF_DLY
    EXPECT_EQ(match_by_content(sigs, content).size(), 1u);
}

// Two null-identical shapes; A expects 0x1234 at offset 2, B declares
// nothing. Known values may only shrink the candidate set, never empty it.
SignatureSet collision_pair() {
    FieldSpec req;
    req.name = "REQ";
    req.elem = ElemType::simple(Elem::Bool);

    FieldSpec val;
    val.name = "VAL";
    val.elem = ElemType::simple(Elem::Word);

    DbLayout a = compile_layout({req, val});
    a.fb_name = "A";
    a.family = "TEST";
    a.header = "A";
    DbLayout b = a;
    b.fb_name = "B";
    b.header = "B";

    SignatureSet set = build_signature_set({a, b});
    for (auto& s : set.entries)
        if (s.fb_name == "A") s.known_values.push_back(KnownValue{2, 16, 0x1234});
    return set;
}

TEST(Match, KnownValuesOnlyBreakTies) {
    const SignatureSet sigs = collision_pair();

    // Content carrying A's expected value: B still matches vacuously, so the
    // tie stands and nobody gets falsely identified.
    Bytes content = {0x00, 0x00, 0x12, 0x34};
    EXPECT_EQ(match_by_content(sigs, content).size(), 2u);

    // Content without it: A drops out, B alone remains.
    content = {0x00, 0x00, 0x00, 0x07};
    auto hits = match_by_content(sigs, content);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0]->fb_name, "B");
}

TEST(Match, KnownValueFilterNeverEmptiesTheSet) {
    SignatureSet sigs = collision_pair();
    for (auto& s : sigs.entries)
        if (s.fb_name == "B") s.known_values.push_back(KnownValue{2, 16, 0x5678});

    // Neither expectation holds; the filter must leave the tie alone.
    const Bytes content = {0x00, 0x00, 0x00, 0x07};
    EXPECT_EQ(match_by_content(sigs, content).size(), 2u);
}

TEST(Classify, VerdictsAndProvisionalGeneration) {
    const SignatureSet sigs = build_signature_set(builtin_catalog());

    BlockFinding hit = classify_content(sigs, 5, fresh_block("MODBUS_COMM_LOAD"));
    EXPECT_EQ(hit.verdict, Verdict::Identified);
    EXPECT_EQ(hit.candidates, (std::vector<std::string>{"MODBUS_COMM_LOAD"}));
    EXPECT_EQ(hit.family, "MODBUS");
    EXPECT_EQ(hit.header, "MBCOMLOA");

    const Bytes custom = {0xaa, 0x00, 0x01, 0x00, 0x00, 0x00, 0x55, 0x00, 0x00, 0x00, 0x00, 0x00};
    BlockFinding miss = classify_content(sigs, 9, custom);
    EXPECT_EQ(miss.verdict, Verdict::Unknown);
    ASSERT_TRUE(miss.provisional.has_value());
    EXPECT_EQ(miss.provisional->fb_name, "CUSTOM_DB9");
    EXPECT_TRUE(miss.provisional->provisional);
    EXPECT_EQ(miss.provisional->total_size, 12);
    EXPECT_EQ(miss.provisional->full_null_bytes,
              (std::vector<std::uint16_t>{1, 3, 4, 5, 7, 8, 9, 10, 11}));
}

TEST(Classify, ProvisionalSignatureClosesTheLoop) {
    // An unknown block's provisional signature, merged back into the set,
    // identifies the next instance of the same shape.
    const SignatureSet base = build_signature_set(builtin_catalog());
    const Bytes first = {0xaa, 0x00, 0x01, 0x00, 0x00, 0x00, 0x55, 0x00, 0x00, 0x00, 0x00, 0x00};
    const BlockFinding unknown = classify_content(base, 9, first);
    ASSERT_TRUE(unknown.provisional.has_value());

    SignatureSet extra;
    extra.entries.push_back(*unknown.provisional);
    const SignatureSet merged = merge_signature_sets(base, extra);
    EXPECT_EQ(merged.source, SignatureSource::CustomGenerated);

    const Bytes second = {0xbb, 0x00, 0xff, 0x00, 0x00, 0x00, 0x11, 0x00, 0x00, 0x00, 0x00, 0x00};
    const BlockFinding found = classify_content(merged, 12, second);
    EXPECT_EQ(found.verdict, Verdict::Identified);
    EXPECT_EQ(found.candidates, (std::vector<std::string>{"CUSTOM_DB9"}));

    const Bytes violating = {0xbb, 0x01, 0xff, 0x00, 0x00, 0x00, 0x11, 0x00, 0x00, 0x00, 0x00, 0x00};
    EXPECT_EQ(classify_content(merged, 12, violating).verdict, Verdict::Unknown);
}

TEST(Fetch, RequestCostStaysWithinTheBound) {
    LivePlc plc(kSizesConfig);
    auto client = plc.connect();

    const struct {
        std::uint16_t db;
        std::size_t size;
    } cases[] = {{1, 552}, {2, 2}, {3, 64}, {4, 128}, {5, 22}};

    for (const auto& c : cases) {
        const std::uint64_t before = client.total_requests();
        const Bytes content = fetch_block_content(client, c.db);
        const std::uint64_t cost = client.total_requests() - before;

        EXPECT_EQ(content.size(), c.size) << "DB" << c.db;
        const std::uint64_t bound = (c.size + 63) / 64 + 7;
        EXPECT_LE(cost, bound) << "DB" << c.db;
        EXPECT_EQ(content, client.read_bytes(c.db, 0, static_cast<std::uint16_t>(c.size)))
            << "DB" << c.db;
    }
}

TEST(Fetch, MissingBlockPropagates) {
    LivePlc plc(kSizesConfig);
    auto client = plc.connect();
    EXPECT_THROW(fetch_block_content(client, 42), Error);
}

TEST(Discover, ProbeFindsExactlyTheConfiguredBlocks) {
    LivePlc plc(kSizesConfig);
    auto client = plc.connect();

    const auto found = discover_by_probe(client, 16);
    EXPECT_EQ(found, (std::vector<std::uint16_t>{1, 2, 3, 4, 5}));
    EXPECT_EQ(client.total_requests(), 16u);
    EXPECT_EQ(client.request_counts().size(), 1u);
    EXPECT_EQ(client.request_counts().begin()->first, Opcode::ReadReq);
}

TEST(Scan, ReadOnlyIdentifiesTheDemoInstances) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    const ScanReport report = scan(client, build_signature_set(builtin_catalog()), {});
    ASSERT_EQ(report.findings.size(), 4u);

    EXPECT_EQ(report.findings[0].db, 1);
    EXPECT_EQ(report.findings[0].verdict, Verdict::Unknown);
    EXPECT_TRUE(report.findings[0].provisional.has_value());

    EXPECT_EQ(report.findings[1].candidates, (std::vector<std::string>{"MODBUS_COMM_LOAD"}));
    EXPECT_EQ(report.findings[2].candidates, (std::vector<std::string>{"IEC_CU"}));
    EXPECT_EQ(report.findings[3].candidates, (std::vector<std::string>{"AS_MAIL"}));
    for (std::size_t i = 1; i < 4; ++i)
        EXPECT_EQ(report.findings[i].verdict, Verdict::Identified);

    // Stealth: a read-only scan leaves nothing but ReadReq in its wake.
    ASSERT_EQ(client.request_counts().size(), 1u);
    EXPECT_EQ(client.request_counts().begin()->first, Opcode::ReadReq);
    EXPECT_EQ(report.requests, client.total_requests());
}

TEST(Scan, MetadataAndUploadAgreeWithReadOnly) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();
    const SignatureSet sigs = build_signature_set(builtin_catalog());

    ScanOptions opt;
    opt.method = ScanMethod::ReadOnly;
    const ScanReport by_read = scan(client, sigs, opt);
    opt.method = ScanMethod::Metadata;
    const ScanReport by_meta = scan(client, sigs, opt);
    opt.method = ScanMethod::Upload;
    const ScanReport by_upload = scan(client, sigs, opt);

    ASSERT_EQ(by_meta.findings.size(), by_read.findings.size());
    ASSERT_EQ(by_upload.findings.size(), by_read.findings.size());
    for (std::size_t i = 0; i < by_read.findings.size(); ++i) {
        EXPECT_EQ(by_meta.findings[i].db, by_read.findings[i].db);
        EXPECT_EQ(by_meta.findings[i].verdict, by_read.findings[i].verdict);
        EXPECT_EQ(by_upload.findings[i].verdict, by_read.findings[i].verdict);
        EXPECT_EQ(by_meta.findings[i].candidates, by_read.findings[i].candidates);
        EXPECT_EQ(by_upload.findings[i].candidates, by_read.findings[i].candidates);
    }

    // The directory methods see the library identity directly.
    EXPECT_EQ(by_meta.findings[1].family, "MODBUS");
    EXPECT_EQ(by_meta.findings[1].header, "MBCOMLOA");
    EXPECT_EQ(by_upload.findings[1].family, "MODBUS");

    // Upload returns content, metadata does not.
    EXPECT_TRUE(by_meta.findings[1].content.empty());
    EXPECT_EQ(by_upload.findings[1].content.size(), 22u);
}

TEST(Scan, ReportSerializes) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    ScanReport report = scan(client, build_signature_set(builtin_catalog()), {});
    report.target = "127.0.0.1";
    const std::string json = scan_report_to_json(report);
    EXPECT_NE(json.find("\"method\": \"read\""), std::string::npos);
    EXPECT_NE(json.find("MODBUS_COMM_LOAD"), std::string::npos);
    EXPECT_NE(json.find("\"verdict\": \"identified\""), std::string::npos);
}

TEST(Scan, MethodNamesParse) {
    EXPECT_EQ(parse_scan_method("read"), ScanMethod::ReadOnly);
    EXPECT_EQ(parse_scan_method("metadata"), ScanMethod::Metadata);
    EXPECT_EQ(parse_scan_method("upload"), ScanMethod::Upload);
    EXPECT_THROW(parse_scan_method("READ"), Error);
    EXPECT_STREQ(scan_method_name(ScanMethod::Upload), "upload");
}

} // namespace
} // namespace pcaad
