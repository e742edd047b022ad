#pragma once

#include "pcaad/catalog.hpp"
#include "pcaad/covert.hpp"
#include "pcaad/enumerate.hpp"
#include "pcaad/exploit.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pcaad {

// target selection -> data retrieval -> block determination -> attack
// selection -> execution -> report. Attacks run only when asked for.
enum class PipelineStage {
    TargetSelection,
    DataRetrieval,
    VbDetermination,
    AttackSelection,
    Execution,
    Report
};
const char* pipeline_stage_name(PipelineStage s);

enum class AttackKind { Exfil, Manipulate, C2 };
const char* attack_kind_name(AttackKind k);
AttackKind parse_attack_kind(const std::string& text);

struct AttackPlanItem {
    std::uint16_t db = 0;
    std::string fb_name;
    AttackKind kind = AttackKind::Exfil;
    std::string detail;
};

struct AttackOutcome {
    AttackKind kind = AttackKind::Exfil;
    std::uint16_t db = 0;
    std::string fb_name;
    bool ok = false;
    std::string detail;
    std::vector<ExfilResult> exfil;
    std::optional<WriteOutcome> write;
};

struct RunReport {
    std::string target;
    bool dry_run = false;
    ScanReport scan;
    std::vector<AttackPlanItem> plan;
    std::vector<AttackOutcome> outcomes;
    std::uint64_t enum_non_read_requests = 0; // stealth tally for the sweep
    std::uint64_t write_requests = 0;         // whole run
    std::int64_t elapsed_ms = 0;
    std::string error; // set when the target could not be processed
};

struct AutoOptions {
    ScanMethod method = ScanMethod::ReadOnly;
    std::vector<AttackKind> attacks; // empty: enumerate and plan only
    bool dry_run = false;
    std::uint16_t probe_limit = 64;
    int verify_after_ms = 30; // manipulation read-back delay
    int timeout_ms = 3000;
};

// One full pipeline pass over one target. Connectivity problems are reported
// in `error` rather than thrown so multi-target sweeps keep going.
RunReport run_pipeline(const std::string& target, const SignatureSet& sigs,
                       const Catalog& catalog, const AutoOptions& options);

// Attack selection on its own, for dry runs and tests.
std::vector<AttackPlanItem> plan_attacks(const std::vector<BlockFinding>& findings,
                                         const Catalog& catalog);

// Secrets stay out of reports unless explicitly requested.
std::string redact_value(const std::string& value);
std::string run_report_to_json(const RunReport& report, bool show_secrets = false);
std::string exfil_results_to_json(const std::vector<ExfilResult>& results, bool show_secrets);

} // namespace pcaad
