#include "pcaad/covert.hpp"

#include "pcaad/catalog.hpp"
#include "pcaad/errors.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace pcaad {
namespace {

using test::LivePlc;

// A block made of BOOL+WORD pairs: every pair leaves the odd byte after the
// flag fully null, so `pairs` is also the full-null-byte count.
FbDecl pair_decl(const std::string& name, int pairs, bool sensitive = false) {
    FbDecl d;
    d.fb_name = name;
    d.family = "TEST";
    d.header = "TESTHDR";
    d.whole_block_sensitive = sensitive;
    for (int i = 0; i < pairs; ++i) {
        FieldSpec flag;
        flag.name = "FLAG" + std::to_string(i);
        flag.elem = ElemType::simple(Elem::Bool);
        d.fields.push_back(flag);
        FieldSpec word;
        word.name = "WORD" + std::to_string(i);
        word.elem = ElemType::simple(Elem::Word);
        d.fields.push_back(word);
    }
    return d;
}

BlockFinding finding(std::uint16_t db, const DbLayout& l,
                     Verdict verdict = Verdict::Identified) {
    BlockFinding f;
    f.db = db;
    f.size = l.total_size;
    f.verdict = verdict;
    f.candidates = {l.fb_name};
    return f;
}

ChannelSpec fast_spec(int max_silent_polls = 200) {
    ChannelSpec spec;
    spec.db = 3;
    spec.sync_offset = 1;
    spec.data_offset = 5;
    spec.poll_interval_ms = 1;
    spec.max_silent_polls = max_silent_polls;
    return spec;
}

template <typename Fn> ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::Malformed;
}

TEST(SyncTable, ValuesMatchTheProtocolTable) {
    EXPECT_EQ(sync_value(SyncState::HelloAck, Role::Server), 0x03);
    EXPECT_EQ(sync_value(SyncState::Write, Role::Server), 0x40);
    EXPECT_EQ(sync_value(SyncState::Reading, Role::Server), 0xf0);
    EXPECT_EQ(sync_value(SyncState::Read, Role::Server), 0x00);
    EXPECT_EQ(sync_value(SyncState::FinalWrite, Role::Server), 0xff);
    EXPECT_EQ(sync_value(SyncState::OnHold, Role::Server), 0x18);

    EXPECT_EQ(sync_value(SyncState::Hello, Role::Client), 0x01);
    EXPECT_EQ(sync_value(SyncState::HelloAck, Role::Client), 0x00);
    EXPECT_EQ(sync_value(SyncState::Write, Role::Client), 0xe0);
    EXPECT_EQ(sync_value(SyncState::Reading, Role::Client), 0x60);
    EXPECT_EQ(sync_value(SyncState::Read, Role::Client), 0x00);
    EXPECT_EQ(sync_value(SyncState::FinalWrite, Role::Client), 0xfe);
    EXPECT_EQ(sync_value(SyncState::OnHold, Role::Client), 0x18);
}

TEST(SyncTable, ServerHasNoHello) {
    EXPECT_EQ(code_of([] { sync_value(SyncState::Hello, Role::Server); }),
              ErrorCode::SyncViolation);
}

TEST(SyncTable, AlphabetMembershipIsPerRole) {
    for (const std::uint8_t v : {0x03, 0x40, 0xf0, 0x00, 0xff, 0x18})
        EXPECT_TRUE(in_sync_alphabet(v, Role::Server)) << int(v);
    for (const std::uint8_t v : {0x01, 0x00, 0xe0, 0x60, 0xfe, 0x18})
        EXPECT_TRUE(in_sync_alphabet(v, Role::Client)) << int(v);

    // hello is client-only; the write/reading nibble patterns do not cross over
    EXPECT_FALSE(in_sync_alphabet(0x01, Role::Server));
    EXPECT_FALSE(in_sync_alphabet(0x40, Role::Client));
    EXPECT_FALSE(in_sync_alphabet(0xf0, Role::Client));
    EXPECT_FALSE(in_sync_alphabet(0xe0, Role::Server));
    EXPECT_FALSE(in_sync_alphabet(0x42, Role::Server));
    EXPECT_FALSE(in_sync_alphabet(0x42, Role::Client));
}

TEST(SelectChannel, MostNullBytesWinsAndTiesGoToTheLowestDb) {
    const DbLayout rich = compile_layout(pair_decl("NULLRICH", 10));
    const DbLayout poor = compile_layout(pair_decl("POOR", 2));
    ASSERT_EQ(rich.full_null_bytes.size(), 10u);
    ASSERT_EQ(poor.full_null_bytes.size(), 2u);
    const std::vector<DbLayout> layouts = {rich, poor};

    // three instances of the null-rich block tie on count; lowest DB wins,
    // and the lower-numbered but null-poor block does not
    const std::vector<BlockFinding> findings = {
        finding(2, poor), finding(5, rich), finding(3, rich), finding(6, rich)};

    const ChannelSpec spec = select_channel(findings, layouts);
    EXPECT_EQ(spec.db, 3);
    EXPECT_EQ(spec.fb_name, "NULLRICH");
    EXPECT_EQ(spec.sync_offset, rich.full_null_bytes[0]);
    EXPECT_EQ(spec.data_offset, rich.full_null_bytes[1]);
}

TEST(SelectChannel, SkipsSensitiveAmbiguousAndNullPoorBlocks) {
    const DbLayout touchy = compile_layout(pair_decl("TOUCHY", 4, true));
    const DbLayout modest = compile_layout(pair_decl("MODEST", 2));
    const DbLayout cramped = compile_layout(pair_decl("CRAMPED", 1));
    ASSERT_TRUE(touchy.whole_block_sensitive);
    ASSERT_EQ(cramped.full_null_bytes.size(), 1u);
    const std::vector<DbLayout> layouts = {touchy, modest, cramped};

    const std::vector<BlockFinding> findings = {
        finding(2, touchy),                     // more nulls, but writes would be seen
        finding(3, cramped),                    // one null byte is not a channel
        finding(4, modest, Verdict::Ambiguous), // identity not settled
        finding(9, modest)};

    const ChannelSpec spec = select_channel(findings, layouts);
    EXPECT_EQ(spec.db, 9);
    EXPECT_EQ(spec.fb_name, "MODEST");
}

TEST(SelectChannel, ThrowsWhenNothingQualifies) {
    const DbLayout touchy = compile_layout(pair_decl("TOUCHY", 4, true));
    const DbLayout modest = compile_layout(pair_decl("MODEST", 2));
    const std::vector<DbLayout> layouts = {touchy, modest};

    std::vector<BlockFinding> findings = {finding(2, touchy),
                                          finding(4, modest, Verdict::Unknown)};
    EXPECT_EQ(code_of([&] { select_channel(findings, layouts); }),
              ErrorCode::NoViableChannel);

    // an identified block whose layout is not on file cannot host either
    BlockFinding ghost;
    ghost.db = 5;
    ghost.verdict = Verdict::Identified;
    ghost.candidates = {"GHOST"};
    EXPECT_EQ(code_of([&] { select_channel({ghost}, layouts); }),
              ErrorCode::NoViableChannel);
}

TEST(SelectChannel, CounterBlockYieldsTheDemoOffsets) {
    const FbDecl* cu = builtin_catalog().find("IEC_CU");
    ASSERT_NE(cu, nullptr);
    const DbLayout layout = compile_layout(*cu);
    const ChannelSpec spec = select_channel({finding(3, layout)}, {layout});
    EXPECT_EQ(spec.db, 3);
    EXPECT_EQ(spec.sync_offset, 1);
    EXPECT_EQ(spec.data_offset, 5);
}

TEST(Channel, RoundTripBothDirections) {
    LivePlc plc(test::kCovertDemoConfig);
    auto a = plc.connect();
    auto b = plc.connect();

    Transcript transcript;
    ChannelEndpoint srv(a, fast_spec(), Role::Server, &transcript);
    ChannelEndpoint cli(b, fast_spec(), Role::Client, &transcript);

    std::string thread_error;
    std::thread peer([&] {
        try {
            srv.handshake(4000);
            const std::string got = srv.recv_text(4000);
            srv.send_text("pong: " + got);
        } catch (const std::exception& e) {
            thread_error = e.what();
        }
    });

    cli.handshake(4000);
    cli.send_text("ping 10.0.0.9");
    const std::string reply = cli.recv_text(4000);
    peer.join();

    EXPECT_EQ(thread_error, "");
    EXPECT_TRUE(srv.handshake_done());
    EXPECT_TRUE(cli.handshake_done());
    EXPECT_EQ(reply, "pong: ping 10.0.0.9");

    // everything on the sync byte stays inside the two role alphabets
    bool saw_data = false;
    for (const TranscriptEntry& e : transcript.snapshot()) {
        if (e.event == "write_sync" || e.event == "read_sync")
            EXPECT_TRUE(in_sync_alphabet(e.value, Role::Server) ||
                        in_sync_alphabet(e.value, Role::Client))
                << int(e.value);
        if (e.event == "write_data" && e.value == 'p') saw_data = true;
    }
    EXPECT_TRUE(saw_data);
}

TEST(Channel, RandomPrintableStringsSurviveTheTrip) {
    LivePlc plc(test::kCovertDemoConfig);
    auto a = plc.connect();
    auto b = plc.connect();
    ChannelEndpoint srv(a, fast_spec(), Role::Server);
    ChannelEndpoint cli(b, fast_spec(), Role::Client);

    std::vector<std::string> messages = {""};
    std::mt19937 rng(0xc0c0);
    std::uniform_int_distribution<int> len(1, 24);
    std::uniform_int_distribution<int> ch(0x20, 0x7e);
    for (int i = 0; i < 8; ++i) {
        std::string s;
        for (int n = len(rng); n > 0; --n) s.push_back(static_cast<char>(ch(rng)));
        messages.push_back(s);
    }

    std::string thread_error;
    std::thread echo([&] {
        try {
            srv.handshake(4000);
            for (std::size_t i = 0; i < messages.size(); ++i)
                srv.send_text(srv.recv_text(4000));
        } catch (const std::exception& e) {
            thread_error = e.what();
        }
    });

    cli.handshake(4000);
    for (const std::string& s : messages) {
        cli.send_text(s);
        EXPECT_EQ(cli.recv_text(4000), s);
    }
    echo.join();
    EXPECT_EQ(thread_error, "");
}

TEST(Channel, NonAsciiIsRefusedBeforeAnyTraffic) {
    LivePlc plc(test::kCovertDemoConfig);
    auto a = plc.connect();
    ChannelEndpoint cli(a, fast_spec(), Role::Client);

    EXPECT_EQ(code_of([&] { cli.send_text("caf\xc3\xa9"); }), ErrorCode::NonAscii);
    EXPECT_EQ(code_of([&] { cli.send_text("a\x7f"); }), ErrorCode::NonAscii);
    EXPECT_TRUE(a.request_counts().empty()) << "the precondition check must not touch the wire";
}

TEST(Channel, ForeignSyncValueIsAViolation) {
    LivePlc plc(test::kCovertDemoConfig);
    auto a = plc.connect();
    auto saboteur = plc.connect();

    const std::uint8_t junk[1] = {0x42};
    saboteur.write_bytes(3, 1, junk);

    ChannelEndpoint srv(a, fast_spec(), Role::Server);
    EXPECT_EQ(code_of([&] { srv.handshake(10); }), ErrorCode::SyncViolation);
}

TEST(Channel, SilentPeerTimesOut) {
    LivePlc plc(test::kCovertDemoConfig);
    auto a = plc.connect();

    ChannelEndpoint srv(a, fast_spec(), Role::Server);
    EXPECT_EQ(code_of([&] { srv.handshake(3); }), ErrorCode::ChannelTimeout);

    auto b = plc.connect();
    ChannelEndpoint talker(b, fast_spec(4), Role::Client);
    EXPECT_EQ(code_of([&] { talker.send_text("x"); }), ErrorCode::ChannelTimeout);
}

TEST(Channel, OnHoldKeepsTheBudgetAlive) {
    LivePlc plc(test::kCovertDemoConfig);
    auto a = plc.connect();
    auto b = plc.connect();

    Transcript transcript;
    ChannelEndpoint srv(a, fast_spec(), Role::Server, &transcript);
    ChannelEndpoint cli(b, fast_spec(), Role::Client, &transcript);

    std::string thread_error;
    std::thread idle_then_send([&] {
        try {
            srv.handshake(4000);
            for (int i = 0; i < 40; ++i) {
                srv.write_on_hold();
                srv.sleep_poll();
            }
            srv.send_text("late");
        } catch (const std::exception& e) {
            thread_error = e.what();
        }
    });

    cli.handshake(4000);
    // 12 polls of budget against 40 polls of idling: only viable because the
    // peer's on-hold marker resets the silence count
    EXPECT_EQ(cli.recv_text(12), "late");
    idle_then_send.join();
    EXPECT_EQ(thread_error, "");

    int holds_written = 0;
    for (const TranscriptEntry& e : transcript.snapshot())
        if (e.role == Role::Server && e.event == "write_sync" && e.value == 0x18)
            ++holds_written;
    EXPECT_EQ(holds_written, 1) << "repeated on-hold writes are suppressed";
}

TEST(C2Session, ScriptedOperatorDrivesTheWhitelist) {
    LivePlc plc(test::kCovertDemoConfig);
    auto a = plc.connect();
    auto b = plc.connect();

    Transcript transcript;
    ChannelEndpoint srv_end(a, fast_spec(), Role::Server, &transcript);
    ChannelEndpoint cli_end(b, fast_spec(), Role::Client, &transcript);

    ScriptedConsole console({"ping 192.168.0.1", "", "id", "rm -rf /"});
    SafeExecutor executor;

    std::string thread_error;
    int client_served = 0;
    std::thread implant([&] {
        try {
            C2Options opts;
            opts.max_commands = 3;
            client_served = run_c2_client(cli_end, executor, opts);
        } catch (const std::exception& e) {
            thread_error = e.what();
        }
    });

    const int served = run_c2_server(srv_end, console, {});
    implant.join();

    EXPECT_EQ(thread_error, "");
    EXPECT_EQ(served, 3);
    EXPECT_EQ(client_served, 3);
    const std::vector<std::string> expected = {
        "reply from 192.168.0.1: time<1ms",
        "uid=1000(operator) gid=1000(operator) groups=1000(operator)",
        "command not permitted"};
    EXPECT_EQ(console.output(), expected);

    for (const TranscriptEntry& e : transcript.snapshot())
        if (e.event == "write_sync" || e.event == "read_sync")
            EXPECT_TRUE(in_sync_alphabet(e.value, Role::Server) ||
                        in_sync_alphabet(e.value, Role::Client))
                << int(e.value);
}

TEST(Executors, SafeExecutorOnlyKnowsThreeCommands) {
    SafeExecutor exec;
    EXPECT_EQ(exec.execute("ping 192.168.0.1"), "reply from 192.168.0.1: time<1ms");
    EXPECT_EQ(exec.execute("  ping   10.1.2.3  "), "reply from 10.1.2.3: time<1ms");
    EXPECT_EQ(exec.execute("ping"), "command not permitted");
    EXPECT_EQ(exec.execute("echo hello plc world"), "hello plc world");
    EXPECT_EQ(exec.execute("echo"), "");
    EXPECT_EQ(exec.execute("id"),
              "uid=1000(operator) gid=1000(operator) groups=1000(operator)");
    EXPECT_EQ(exec.execute("ls"), "command not permitted");
    EXPECT_EQ(exec.execute("cat /etc/passwd"), "command not permitted");
    EXPECT_EQ(exec.execute(""), "command not permitted");
}

TEST(Executors, SanitizerMapsUntransmissibleBytesToQuestionMarks) {
    EXPECT_EQ(ascii_sanitize("plain text, tab\tand\nnewline survive"),
              "plain text, tab\tand\nnewline survive");
    EXPECT_EQ(ascii_sanitize("\x01" "bad" "\x80"), "?bad?");
    EXPECT_EQ(ascii_sanitize(std::string("a\0b", 3)), "a?b");
}

TEST(CovertTranscript, JsonlCarriesEventsInOrder) {
    Transcript t;
    TranscriptEntry hello;
    hello.t_us = 10;
    hello.role = Role::Client;
    hello.event = "write_sync";
    hello.value = 0x01;
    t.append(hello);
    TranscriptEntry note;
    note.t_us = 25;
    note.role = Role::Server;
    note.event = "note";
    note.text = "handshake complete";
    t.append(note);

    const std::string jsonl = t.to_jsonl();
    std::istringstream lines(jsonl);
    std::string first, second, extra;
    ASSERT_TRUE(std::getline(lines, first));
    ASSERT_TRUE(std::getline(lines, second));
    EXPECT_FALSE(std::getline(lines, extra));
    EXPECT_NE(first.find("\"role\":\"client\""), std::string::npos);
    EXPECT_NE(first.find("\"event\":\"write_sync\""), std::string::npos);
    EXPECT_NE(first.find("\"value\":1"), std::string::npos);
    EXPECT_NE(second.find("\"text\":\"handshake complete\""), std::string::npos);

    const std::string path = testing::TempDir() + "covert_transcript.jsonl";
    t.save(path);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    EXPECT_EQ(body.str(), jsonl);
}

} // namespace
} // namespace pcaad
