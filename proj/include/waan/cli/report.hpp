#pragma once
// Run reports. Every figure is recomputed from the event trace alone, so a
// report can be rebuilt from a trace file without rerunning the simulation,
// and two traces can be compared mode-against-mode.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "waan/cli/scenario.hpp"
#include "waan/sim/trace.hpp"

namespace waan::cli {

struct IntentReport {
    core::IntentId intent_id;
    core::UserId user;
    bool completed = false;
    bool failed = false;
    core::SimTime completed_at = -1;
    core::SimTime completion_latency_ms = -1;
    bool qoe_met = false;
    std::int64_t executed_units = 0;
    std::int64_t recomputed_units = 0;
    int resubmissions = 0;
    int stale_discards = 0;
    int handovers_success = 0;
    int handovers_fallback = 0;
    int handovers_abort = 0;
};

struct RunReport {
    std::string scenario_name;
    std::string mode;
    std::uint64_t seed = 0;
    std::uint64_t scenario_hash = 0;
    std::vector<IntentReport> intents;  // intent-id order

    std::int64_t total_executed = 0;
    std::int64_t total_recomputed = 0;
    int completed_count = 0;
    int failed_count = 0;
    int total_resubmissions = 0;
    int total_stale_discards = 0;
    int handover_success = 0;
    int handover_fallback = 0;
    int handover_abort = 0;
};

// Aggregates a report from trace records. Throws core::SchemaMismatch when
// the first record is not a run_start with the expected schema tag.
RunReport report_from_trace(const sim::EventTrace& trace);

// Same, from serialized JSONL (one record per line).
RunReport report_from_jsonl(const std::string& jsonl);

// One row per intent plus a totals row.
std::string to_tsv(const RunReport& report);

// Machine-readable form of the same numbers.
core::ojson to_summary_json(const RunReport& report);

// Side-by-side comparison of two runs of the same scenario (typically
// intent-aware vs. baseline). Intents are matched by id.
std::string compare_tsv(const RunReport& a, const RunReport& b);

struct MatrixCell {
    std::uint64_t seed = 0;
    RunMode mode = RunMode::WAAN;
    std::optional<RunReport> report;
    std::string error;  // non-empty when the run failed
};

// Runs the scenario for every (seed, mode) pair concurrently. A failing cell
// carries its error message; other cells are unaffected.
std::vector<MatrixCell> run_matrix(const Scenario& base, const std::vector<std::uint64_t>& seeds,
                                   const std::vector<RunMode>& modes);

// One row per matrix cell with headline aggregates.
std::string matrix_tsv(const std::vector<MatrixCell>& cells);

}  // namespace waan::cli
