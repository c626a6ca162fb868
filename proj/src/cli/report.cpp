#include "waan/cli/report.hpp"

#include <future>
#include <map>
#include <sstream>

#include "waan/core/error.hpp"
#include "waan/sim/simulation.hpp"

namespace waan::cli {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

RunReport report_from_trace(const sim::EventTrace& trace) {
    if (trace.records.empty()) {
        throw core::SchemaMismatch("trace is empty");
    }
    const auto& head = trace.records.front();
    if (!head.contains("kind") || head.at("kind") != "run_start" || !head.contains("schema") ||
        head.at("schema") != sim::kTraceSchema) {
        throw core::SchemaMismatch("trace does not start with a run_start record of schema " +
                                   std::string(sim::kTraceSchema));
    }
    RunReport rep;
    rep.scenario_name = head.at("name").get<std::string>();
    rep.mode = head.at("mode").get<std::string>();
    rep.seed = head.at("seed").get<std::uint64_t>();
    rep.scenario_hash = head.at("scenario_hash").get<std::uint64_t>();

    std::map<core::IntentId, IntentReport> by_intent;
    auto entry = [&](const core::ojson& r) -> IntentReport& {
        const auto id = r.at("intent").get<std::string>();
        auto [pos, inserted] = by_intent.try_emplace(id);
        if (inserted) pos->second.intent_id = id;
        return pos->second;
    };

    for (const auto& r : trace.records) {
        const auto kind = r.at("kind").get<std::string>();
        if (kind == "intent_submitted") {
            auto& e = entry(r);
            e.user = r.at("user").get<std::string>();
        } else if (kind == "quantum_done") {
            auto& e = entry(r);
            e.executed_units += 1;
            if (r.at("recomputed").get<bool>()) e.recomputed_units += 1;
        } else if (kind == "resubmission") {
            auto& e = entry(r);
            e.resubmissions = std::max(e.resubmissions, r.at("count").get<int>());
        } else if (kind == "stale_discard") {
            entry(r).stale_discards += 1;
        } else if (kind == "handover_outcome") {
            auto& e = entry(r);
            const auto result = r.at("result").get<std::string>();
            if (result == "success") e.handovers_success += 1;
            else if (result == "fallback_success") e.handovers_fallback += 1;
            else e.handovers_abort += 1;
        } else if (kind == "result_delivered") {
            auto& e = entry(r);
            e.completed = true;
            e.completed_at = r.at("t").get<core::SimTime>();
            e.completion_latency_ms = r.at("completion_latency_ms").get<core::SimTime>();
            e.qoe_met = r.at("qoe_met").get<bool>();
        } else if (kind == "ttl_expired" || kind == "intent_failed") {
            entry(r).failed = true;
        }
    }

    for (auto& [id, e] : by_intent) {
        rep.total_executed += e.executed_units;
        rep.total_recomputed += e.recomputed_units;
        rep.completed_count += e.completed ? 1 : 0;
        rep.failed_count += e.failed ? 1 : 0;
        rep.total_resubmissions += e.resubmissions;
        rep.total_stale_discards += e.stale_discards;
        rep.handover_success += e.handovers_success;
        rep.handover_fallback += e.handovers_fallback;
        rep.handover_abort += e.handovers_abort;
        rep.intents.push_back(std::move(e));
    }
    return rep;
}

RunReport report_from_jsonl(const std::string& jsonl) {
    sim::EventTrace trace;
    std::istringstream in(jsonl);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            trace.records.push_back(core::ojson::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw core::ParseError("trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return report_from_trace(trace);
}

std::string to_tsv(const RunReport& rep) {
    std::ostringstream os;
    os << "intent\tuser\tcompleted\tfailed\tcompletion_latency_ms\tqoe_met\texecuted_units"
          "\trecomputed_units\tresubmissions\tstale_discards\tho_success\tho_fallback\tho_abort\n";
    for (const auto& e : rep.intents) {
        os << e.intent_id << '\t' << e.user << '\t' << (e.completed ? 1 : 0) << '\t'
           << (e.failed ? 1 : 0) << '\t' << e.completion_latency_ms << '\t'
           << (e.qoe_met ? 1 : 0) << '\t' << e.executed_units << '\t' << e.recomputed_units
           << '\t' << e.resubmissions << '\t' << e.stale_discards << '\t' << e.handovers_success
           << '\t' << e.handovers_fallback << '\t' << e.handovers_abort << '\n';
    }
    os << "TOTAL\t-\t" << rep.completed_count << '\t' << rep.failed_count << "\t-\t-\t"
       << rep.total_executed << '\t' << rep.total_recomputed << '\t' << rep.total_resubmissions
       << '\t' << rep.total_stale_discards << '\t' << rep.handover_success << '\t'
       << rep.handover_fallback << '\t' << rep.handover_abort << '\n';
    return os.str();
}

core::ojson to_summary_json(const RunReport& rep) {
    core::ojson j;
    j["scenario"] = rep.scenario_name;
    j["mode"] = rep.mode;
    j["seed"] = rep.seed;
    j["scenario_hash"] = rep.scenario_hash;
    auto intents = core::ojson::array();
    for (const auto& e : rep.intents) {
        intents.push_back(core::ojson{{"intent", e.intent_id},
                                      {"user", e.user},
                                      {"completed", e.completed},
                                      {"failed", e.failed},
                                      {"completed_at", e.completed_at},
                                      {"completion_latency_ms", e.completion_latency_ms},
                                      {"qoe_met", e.qoe_met},
                                      {"executed_units", e.executed_units},
                                      {"recomputed_units", e.recomputed_units},
                                      {"resubmissions", e.resubmissions},
                                      {"stale_discards", e.stale_discards},
                                      {"handovers_success", e.handovers_success},
                                      {"handovers_fallback", e.handovers_fallback},
                                      {"handovers_abort", e.handovers_abort}});
    }
    j["intents"] = std::move(intents);
    j["totals"] = core::ojson{{"executed_units", rep.total_executed},
                              {"recomputed_units", rep.total_recomputed},
                              {"completed", rep.completed_count},
                              {"failed", rep.failed_count},
                              {"resubmissions", rep.total_resubmissions},
                              {"stale_discards", rep.total_stale_discards},
                              {"handover_success", rep.handover_success},
                              {"handover_fallback", rep.handover_fallback},
                              {"handover_abort", rep.handover_abort}};
    return j;
}

std::string compare_tsv(const RunReport& a, const RunReport& b) {
    std::map<core::IntentId, const IntentReport*> left, right;
    for (const auto& e : a.intents) left[e.intent_id] = &e;
    for (const auto& e : b.intents) right[e.intent_id] = &e;
    std::map<core::IntentId, bool> ids;
    for (const auto& [id, _] : left) ids[id] = true;
    for (const auto& [id, _] : right) ids[id] = true;

    std::ostringstream os;
    os << "intent\t" << a.mode << "_latency_ms\t" << b.mode << "_latency_ms\tlatency_delta_ms\t"
       << a.mode << "_recomputed\t" << b.mode << "_recomputed\t" << a.mode << "_resubmissions\t"
       << b.mode << "_resubmissions\n";
    for (const auto& [id, _] : ids) {
        const IntentReport* l = left.count(id) ? left[id] : nullptr;
        const IntentReport* r = right.count(id) ? right[id] : nullptr;
        const core::SimTime la = l && l->completed ? l->completion_latency_ms : -1;
        const core::SimTime lb = r && r->completed ? r->completion_latency_ms : -1;
        os << id << '\t' << la << '\t' << lb << '\t'
           << (la >= 0 && lb >= 0 ? num(static_cast<double>(lb - la)) : "-") << '\t'
           << (l ? l->recomputed_units : 0) << '\t' << (r ? r->recomputed_units : 0) << '\t'
           << (l ? l->resubmissions : 0) << '\t' << (r ? r->resubmissions : 0) << '\n';
    }
    return os.str();
}

std::vector<MatrixCell> run_matrix(const Scenario& base, const std::vector<std::uint64_t>& seeds,
                                   const std::vector<RunMode>& modes) {
    struct Job {
        std::uint64_t seed;
        RunMode mode;
        std::future<RunReport> fut;
    };
    std::vector<Job> jobs;
    for (const auto seed : seeds) {
        for (const auto mode : modes) {
            Scenario sc = base;
            sc.seed = seed;
            sc.mode = mode;
            jobs.push_back(Job{seed, mode, std::async(std::launch::async, [sc]() {
                                  return report_from_trace(sim::run(sc).trace);
                              })});
        }
    }
    std::vector<MatrixCell> cells;
    for (auto& job : jobs) {
        MatrixCell cell;
        cell.seed = job.seed;
        cell.mode = job.mode;
        try {
            cell.report = job.fut.get();
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::string matrix_tsv(const std::vector<MatrixCell>& cells) {
    std::ostringstream os;
    os << "seed\tmode\tcompleted\tfailed\texecuted_units\trecomputed_units\tresubmissions"
          "\tho_success\tho_fallback\tho_abort\terror\n";
    for (const auto& c : cells) {
        os << c.seed << '\t' << to_string(c.mode) << '\t';
        if (c.report) {
            const auto& r = *c.report;
            os << r.completed_count << '\t' << r.failed_count << '\t' << r.total_executed << '\t'
               << r.total_recomputed << '\t' << r.total_resubmissions << '\t'
               << r.handover_success << '\t' << r.handover_fallback << '\t' << r.handover_abort
               << "\t-\n";
        } else {
            os << "-\t-\t-\t-\t-\t-\t-\t-\t" << c.error << '\n';
        }
    }
    return os.str();
}

}  // namespace waan::cli
