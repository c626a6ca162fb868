// waan-sim: scenario runner and report tool for the intent-aware handover
// simulator. Exit codes: 0 success, 1 configuration or input error,
// 2 runtime invariant violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "waan/cli/report.hpp"
#include "waan/cli/scenario.hpp"
#include "waan/core/error.hpp"
#include "waan/sim/simulation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kInvariantError = 2;

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw waan::core::ParseError("cannot write " + path.string());
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw waan::core::ParseError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string violations_text(const std::vector<waan::core::Violation>& vs) {
    std::string out;
    for (const auto& v : vs) {
        out += "  " + v.field + ": " + v.rule + "\n";
    }
    return out;
}

int cmd_validate(const std::string& path) {
    const auto sc = waan::cli::load_scenario(path);
    std::cout << "OK " << sc.name << " (" << waan::cli::to_string(sc.mode) << ", "
              << sc.nodes.size() << " nodes, " << sc.users.size() << " users, hash "
              << waan::cli::scenario_hash(sc) << ")\n";
    return kOk;
}

int cmd_run(const std::string& path, std::uint64_t seed, bool seed_set, const std::string& mode,
            const std::string& out_dir) {
    auto sc = waan::cli::load_scenario(path);
    if (seed_set) sc.seed = seed;
    if (!mode.empty()) sc.mode = waan::cli::mode_from_string(mode);

    const auto result = waan::sim::run(sc);
    const auto report = waan::cli::report_from_trace(result.trace);

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        const std::string stem =
            sc.name + "-" + waan::cli::to_string(sc.mode) + "-s" + std::to_string(sc.seed);
        write_file(dir / (stem + ".trace.jsonl"), result.trace.to_jsonl());
        write_file(dir / (stem + ".audit.jsonl"), waan::sim::audits_to_jsonl(result, sc));
        write_file(dir / (stem + ".report.tsv"), waan::cli::to_tsv(report));
        write_file(dir / (stem + ".summary.json"),
                   waan::cli::to_summary_json(report).dump(2) + "\n");
        std::cout << "wrote " << (dir / stem).string() << ".{trace.jsonl,audit.jsonl,report.tsv,summary.json}\n";
    }
    std::cout << waan::cli::to_tsv(report);
    return kOk;
}

int cmd_matrix(const std::string& path, const std::string& seeds_csv, const std::string& modes_csv,
               const std::string& out_dir) {
    const auto sc = waan::cli::load_scenario(path);
    std::vector<std::uint64_t> seeds;
    {
        std::istringstream in(seeds_csv);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            if (!tok.empty()) seeds.push_back(std::stoull(tok));
        }
    }
    std::vector<waan::cli::RunMode> modes;
    {
        std::istringstream in(modes_csv);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            if (!tok.empty()) modes.push_back(waan::cli::mode_from_string(tok));
        }
    }
    if (seeds.empty() || modes.empty()) {
        throw waan::core::ParseError("matrix needs at least one seed and one mode");
    }
    const auto cells = waan::cli::run_matrix(sc, seeds, modes);
    const auto tsv = waan::cli::matrix_tsv(cells);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(std::filesystem::path(out_dir) / (sc.name + ".matrix.tsv"), tsv);
    }
    std::cout << tsv;
    for (const auto& c : cells) {
        if (!c.error.empty()) return kInputError;
    }
    return kOk;
}

int cmd_report(const std::vector<std::string>& traces) {
    std::vector<waan::cli::RunReport> reports;
    for (const auto& path : traces) {
        reports.push_back(waan::cli::report_from_jsonl(read_file(path)));
        std::cout << "# " << path << "\n" << waan::cli::to_tsv(reports.back());
    }
    if (reports.size() == 2) {
        std::cout << "# comparison\n" << waan::cli::compare_tsv(reports[0], reports[1]);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic simulator for intent-aware execution handover"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::uint64_t seed = 0;
    std::string mode;
    std::string out_dir;
    std::string seeds_csv = "1";
    std::string modes_csv = "waan,baseline";
    std::vector<std::string> trace_paths;

    auto* v = app.add_subcommand("validate", "parse and validate a scenario file");
    v->add_option("scenario", scenario_path, "scenario file")->required();

    auto* r = app.add_subcommand("run", "run one scenario and report");
    r->add_option("scenario", scenario_path, "scenario file")->required();
    auto* seed_opt = r->add_option("--seed", seed, "override the scenario seed");
    r->add_option("--mode", mode, "override the scenario mode (waan|baseline)");
    r->add_option("--out", out_dir, "directory for trace/audit/report artifacts");

    auto* m = app.add_subcommand("matrix", "run a seeds x modes grid concurrently");
    m->add_option("scenario", scenario_path, "scenario file")->required();
    m->add_option("--seeds", seeds_csv, "comma-separated seed list");
    m->add_option("--modes", modes_csv, "comma-separated mode list");
    m->add_option("--out", out_dir, "directory for the matrix table");

    auto* rep = app.add_subcommand("report", "rebuild reports from trace files");
    rep->add_option("traces", trace_paths, "trace .jsonl files (two files also compare)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (v->parsed()) return cmd_validate(scenario_path);
        if (r->parsed()) return cmd_run(scenario_path, seed, seed_opt->count() > 0, mode, out_dir);
        if (m->parsed()) return cmd_matrix(scenario_path, seeds_csv, modes_csv, out_dir);
        if (rep->parsed()) return cmd_report(trace_paths);
    } catch (const waan::core::ValidationFailure& e) {
        std::cerr << "validation failed:\n" << violations_text(e.violations) << std::flush;
        return kInputError;
    } catch (const waan::core::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariantError;
    } catch (const waan::core::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}
