#include "pcaad/errors.hpp"
#include "pcaad/softplc/server.hpp"
#include "pcaad/spp/client.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

namespace pcaad {
namespace {

using softplc::RequestEvent;
using spp::Opcode;
using spp::Status;
using test::LivePlc;

std::uint8_t raw_status(spp::SppClient& client, Opcode op, const Bytes& payload) {
    const spp::Frame resp = client.transact(op, payload);
    return resp.payload.empty() ? 0xee : resp.payload[0];
}

TEST(Server, ReadWriteRoundTripOnGlobalBlock) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    const Bytes data = {0xde, 0xad, 0xbe, 0xef};
    client.write_bytes(1, 100, data);
    EXPECT_EQ(client.read_bytes(1, 100, 4), data);
    EXPECT_EQ(client.read_bytes(1, 102, 1), (Bytes{0xbe}));
}

TEST(Server, StatusMappingThroughTheClient) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    try {
        client.read_bytes(99, 0, 1);
        FAIL() << "db 99 does not exist";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BlockNotFound);
    }

    try {
        client.read_bytes(7, 6, 4); // counter block is 8 bytes
        FAIL() << "read past the end";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    }

    try {
        client.write_bytes(99, 0, Bytes{0x00});
        FAIL() << "write to a missing block";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BlockNotFound);
    }
}

TEST(Server, MalformedPayloadsGetStatusNotDisconnect) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    // Short read payload.
    EXPECT_EQ(raw_status(client, Opcode::ReadReq, Bytes{0x00, 0x01, 0x00, 0x00, 0x00}),
              static_cast<std::uint8_t>(Status::Malformed));
    // Zero-length read.
    EXPECT_EQ(raw_status(client, Opcode::ReadReq, Bytes{0x00, 0x01, 0x00, 0x00, 0x00, 0x00}),
              static_cast<std::uint8_t>(Status::Malformed));
    // Count whose response (status + data) cannot fit a frame.
    EXPECT_EQ(raw_status(client, Opcode::ReadReq, Bytes{0x00, 0x01, 0x00, 0x00, 0x10, 0x00}),
              static_cast<std::uint8_t>(Status::OversizePayload));
    // Upload payload must be exactly the DB number.
    EXPECT_EQ(raw_status(client, Opcode::UploadReq, Bytes{0x00}),
              static_cast<std::uint8_t>(Status::Malformed));
    // List takes no payload.
    EXPECT_EQ(raw_status(client, Opcode::ListBlocksReq, Bytes{0x01}),
              static_cast<std::uint8_t>(Status::Malformed));
    // Unknown opcode.
    EXPECT_EQ(raw_status(client, static_cast<Opcode>(0x0f), Bytes{}),
              static_cast<std::uint8_t>(Status::Malformed));

    // The connection survived all of that.
    EXPECT_NO_THROW(client.read_bytes(1, 0, 1));
}

TEST(Server, FeatureGatesAnswerRefused) {
    std::string cfg = test::kSmallDemoConfig;
    const std::string features = R"("features": { "uploads_enabled": false, "block_info_enabled": false, "writes_enabled": false },)";
    cfg.insert(cfg.find("\"global_dbs\""), features);

    LivePlc plc(cfg);
    auto client = plc.connect();

    EXPECT_EQ(raw_status(client, Opcode::UploadReq, Bytes{0x00, 0x05}),
              static_cast<std::uint8_t>(Status::Refused));
    EXPECT_EQ(raw_status(client, Opcode::BlockInfoReq, Bytes{0x00, 0x05}),
              static_cast<std::uint8_t>(Status::Refused));
    EXPECT_EQ(raw_status(client, Opcode::ListBlocksReq, Bytes{}),
              static_cast<std::uint8_t>(Status::Refused));
    EXPECT_EQ(raw_status(client, Opcode::WriteReq, Bytes{0x00, 0x01, 0x00, 0x00, 0xaa}),
              static_cast<std::uint8_t>(Status::Refused));

    // Reads stay open; that is the whole point of the read-only posture.
    EXPECT_NO_THROW(client.read_bytes(5, 0, 22));
}

TEST(Server, UploadCarriesLibraryIdentity) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    // let the first cycle write DONE so the two snapshots below are steady
    std::this_thread::sleep_for(std::chrono::milliseconds(30));

    const spp::BlockImage image = client.upload_block(5);
    EXPECT_EQ(image.meta.id.number, 5);
    EXPECT_EQ(image.meta.family, "MODBUS");
    EXPECT_EQ(image.meta.header, "MBCOMLOA");
    EXPECT_EQ(image.author, "LIBRARY");
    ASSERT_EQ(image.body.size(), 22u);
    EXPECT_EQ(image.body, client.read_bytes(5, 0, 22));
}

TEST(Server, BlockInfoNamesTheOwningFb) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    const BlockMeta meta = client.get_block_info(5);
    EXPECT_EQ(meta.family, "MODBUS");
    EXPECT_EQ(meta.header, "MBCOMLOA");
    EXPECT_EQ(meta.body_length, 22);
    ASSERT_TRUE(meta.associated_fb.has_value());
    EXPECT_EQ(meta.associated_fb->kind, BlockClass::FB);
    EXPECT_EQ(meta.associated_fb->number, 1); // first library block

    const BlockMeta global = client.get_block_info(1);
    EXPECT_EQ(global.family, "");
    EXPECT_FALSE(global.associated_fb.has_value());
}

TEST(Server, ListBlocksAscending) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    const auto blocks = client.list_blocks();
    ASSERT_EQ(blocks.size(), 4u);
    EXPECT_EQ(blocks[0].first.number, 1);
    EXPECT_EQ(blocks[0].second, 552);
    EXPECT_EQ(blocks[1].first.number, 5);
    EXPECT_EQ(blocks[2].first.number, 7);
    EXPECT_EQ(blocks[3].first.number, 8);
    EXPECT_EQ(blocks[3].second, 34);
}

TEST(Server, EventLogSeesEveryRequest) {
    LivePlc plc(test::kSmallDemoConfig);
    auto client = plc.connect();

    client.read_bytes(1, 0, 2);
    try {
        client.read_bytes(99, 0, 1);
    } catch (const Error&) {
    }
    client.write_bytes(1, 0, Bytes{0x01});

    const auto events = plc.server->event_log().snapshot();
    ASSERT_EQ(events.size(), 3u);
    EXPECT_EQ(events[0].opcode, static_cast<std::uint8_t>(Opcode::ReadReq));
    EXPECT_EQ(events[0].db, 1);
    EXPECT_EQ(events[0].size, 2u);
    EXPECT_EQ(events[0].status, static_cast<std::uint8_t>(Status::Ok));
    EXPECT_EQ(events[1].db, 99);
    EXPECT_EQ(events[1].status, static_cast<std::uint8_t>(Status::BlockNotFound));
    EXPECT_EQ(events[2].opcode, static_cast<std::uint8_t>(Opcode::WriteReq));

    const std::string jsonl = plc.server->event_log().to_jsonl();
    EXPECT_NE(jsonl.find("\"opcode\":\"ReadReq\""), std::string::npos);
    EXPECT_NE(jsonl.find("\"status\":\"BlockNotFound\""), std::string::npos);
}

TEST(Server, OversizeDeclaredPayloadAnswersThenCloses) {
    LivePlc plc(test::kSmallDemoConfig);

    auto [host, port] = spp::split_host_port(plc.server->endpoint());
    spp::TcpStream raw = spp::TcpStream::connect(host, port);

    // Header declaring a 4097-byte payload; the server answers status 0x05
    // without waiting for the bytes, then hangs up.
    const Bytes header = {0x53, 0x50, 0x01, 0x01, 0x00, 0x07, 0x10, 0x01};
    raw.send_all(header);

    Bytes resp(spp::kHeaderSize + 1);
    raw.set_recv_timeout(2000);
    ASSERT_NO_THROW(raw.recv_exact(resp.data(), resp.size()));
    EXPECT_EQ(resp[3], 0x81); // ReadResp
    EXPECT_EQ(resp[4], 0x00);
    EXPECT_EQ(resp[5], 0x07); // request id echoed
    EXPECT_EQ(resp[8], static_cast<std::uint8_t>(Status::OversizePayload));

    std::uint8_t one;
    EXPECT_THROW(raw.recv_exact(&one, 1), Error); // closed
}

TEST(Server, ParallelClientsShareOneConsistentImage) {
    LivePlc plc(test::kSmallDemoConfig);

    std::vector<std::thread> workers;
    std::atomic<int> failures{0};
    for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&plc, &failures, w] {
            try {
                auto client = plc.connect();
                for (int i = 0; i < 50; ++i) {
                    const std::uint16_t offset = static_cast<std::uint16_t>(120 + w * 8);
                    const Bytes data = {static_cast<std::uint8_t>(w), static_cast<std::uint8_t>(i)};
                    client.write_bytes(1, offset, data);
                    if (client.read_bytes(1, offset, 2) != data) ++failures;
                }
            } catch (const Error&) {
                ++failures;
            }
        });
    }
    for (auto& t : workers) t.join();
    EXPECT_EQ(failures.load(), 0);
}

} // namespace
} // namespace pcaad
