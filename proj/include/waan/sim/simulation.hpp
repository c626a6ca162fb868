#pragma once
// The run engine: composes mobility, radio, compute, swarm discovery, the
// handover protocol, rendezvous stores, and outcome learning into one
// deterministic discrete-event run over a scenario.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "waan/cli/scenario.hpp"
#include "waan/rendezvous/store.hpp"
#include "waan/sim/trace.hpp"

namespace waan::sim {

struct RunResult {
    EventTrace trace;
    // Per-rendezvous audit logs, sorted by node id.
    std::vector<std::pair<core::NodeId, std::vector<rendezvous::AuditRecord>>> audits;
};

// Executes the scenario with its embedded mode and seed. The same
// (scenario, seed, mode) triple always yields a byte-identical trace.
RunResult run(const cli::Scenario& scenario);

// Audit logs as line-delimited records, preceded by one header line.
std::string audits_to_jsonl(const RunResult& result, const cli::Scenario& scenario);

}  // namespace waan::sim
