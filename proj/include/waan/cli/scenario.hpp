#pragma once
// Scenario configuration: strict schema, validation, and the canonical JSON
// echo whose hash identifies the run configuration in trace headers.

#include <cstdint>
#include <string>
#include <vector>

#include "waan/core/json.hpp"
#include "waan/core/ops.hpp"
#include "waan/core/types.hpp"
#include "waan/sim/mobility.hpp"
#include "waan/sim/radio.hpp"
#include "waan/swarm/swarm.hpp"

namespace waan::cli {

enum class RunMode { WAAN, Baseline };

const char* to_string(RunMode m);
RunMode mode_from_string(const std::string& s);

enum class FaultAction { LinkDown, LinkUp, NodeDown };

const char* to_string(FaultAction a);
FaultAction fault_action_from_string(const std::string& s);

struct FaultInjection {
    core::SimTime at_ms = 0;
    core::NodeId node_id;
    FaultAction action = FaultAction::LinkDown;
    friend bool operator==(const FaultInjection&, const FaultInjection&) = default;
};

struct NodeSpec {
    core::NodeProfile profile;
    std::int64_t bandwidth_bps = 0;          // nominal uplink for transfers
    core::TrafficType default_traffic = core::TrafficType::Interactive;
    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct UserSpec {
    core::UserId user_id;
    std::string zone_id;
    core::SimTime submit_at_ms = 0;
    sim::MobilityPath path;
    core::IntentTemplate intent;
    friend bool operator==(const UserSpec&, const UserSpec&) = default;
};

struct Knobs {
    core::SimTime t_prepare_ms = 0;  // 0 = derive from transfer estimate + deadline
    core::SimTime swarm_deadline_ms = 50;
    core::SimTime staleness_max_ms = 2000;
    std::int64_t checkpoint_interval_units = 10;
    double eta = 0.1;
    std::int64_t k_min = 3;
    core::SimTime mobility_tick_ms = 100;
    std::int64_t policy_overhead_bytes = 200;
    std::int64_t link_params_bytes = 64;
    core::SimTime reply_jitter_max_ms = 3;
    double link_latency_bonus_pct = 0.0;  // latency cut granted by applied link params
    core::SimTime retrigger_cooldown_ms = 1000;
    core::RankingWeights initial_weights;
    swarm::NormalizationBounds normalization;
    friend bool operator==(const Knobs&, const Knobs&) = default;
};

struct Scenario {
    std::string name;
    RunMode mode = RunMode::WAAN;
    std::uint64_t seed = 1;
    core::SimTime end_time_ms = 0;
    sim::WorldBounds world;
    sim::RadioModel radio;
    std::vector<NodeSpec> nodes;
    std::vector<UserSpec> users;
    Knobs knobs;
    std::vector<FaultInjection> faults;
};

// Strict parse: every field must be known, required fields present, types
// exact. Unknown fields raise core::ParseError naming the offending field.
Scenario parse_scenario(const core::ojson& j);

// Reads and parses the file, then validates; throws core::ParseError or
// core::ValidationFailure.
Scenario load_scenario(const std::string& path);

// All structural invariants, each violation reported: unique resolvable ids,
// positive radii/bandwidths, integral compute quanta, monotone waypoints,
// submit/end/fault time ordering, valid intent templates.
core::ValidationResult validate_scenario(const Scenario& s);

// Canonical JSON echo (defaults filled in, fixed key order); parsing the
// echo yields an identical scenario.
core::ojson to_json(const Scenario& s);

// FNV-1a over the canonical echo; identifies the configuration in traces.
std::uint64_t scenario_hash(const Scenario& s);

}  // namespace waan::cli
