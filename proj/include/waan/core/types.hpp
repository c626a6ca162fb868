#pragma once
// Shared value types used by every module. All of these are immutable value
// objects once constructed; they carry no behavior beyond small derived
// accessors, so they are safe to copy across module boundaries and threads.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace waan::core {

using SimTime = std::int64_t;  // integer milliseconds since run start
using NodeId = std::string;
using UserId = std::string;
using IntentId = std::string;
using SubTaskId = std::string;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

enum class CapabilityClass { Microcontroller, Smartphone, EdgeNode, Cloud };
enum class TrafficType { Interactive, Bulk, Streaming };
enum class SubTaskKind { SensorFusion, MultimodalSummarization, EnvironmentControl, Generic };

const char* to_string(CapabilityClass c);
const char* to_string(TrafficType t);
const char* to_string(SubTaskKind k);
CapabilityClass capability_from_string(const std::string& s);
TrafficType traffic_from_string(const std::string& s);
SubTaskKind subtask_kind_from_string(const std::string& s);

// How many subtasks a node of this class may host at once (running + queued).
int concurrent_slots(CapabilityClass c);

// Zone label plus intent revision; two tags are relevant to each other per
// the discrete relevance map in handover::relevance().
struct ContextTag {
    std::string zone_id;
    std::uint32_t intent_version = 1;
    friend bool operator==(const ContextTag&, const ContextTag&) = default;
};

struct QoERequirements {
    SimTime max_latency_ms = 0;
    double min_accuracy = 0.0;  // recorded, not simulated
    TrafficType traffic_type = TrafficType::Interactive;
    friend bool operator==(const QoERequirements&, const QoERequirements&) = default;
};

struct SemanticTTL {
    SimTime created_at = 0;
    SimTime time_budget_ms = 0;
    ContextTag context;
    double relevance_threshold = 0.0;
    friend bool operator==(const SemanticTTL&, const SemanticTTL&) = default;

    SimTime expires_at() const { return created_at + time_budget_ms; }
};

// Work unit counts are abstract compute units; intermediate state grows
// affinely with progress: state_bytes(p) = state_base + state_slope * p.
struct SubTask {
    SubTaskId subtask_id;
    SubTaskKind kind = SubTaskKind::Generic;
    std::int64_t work_units = 1;
    std::int64_t input_size_bytes = 0;
    double state_base_bytes = 0.0;
    double state_slope_bytes = 0.0;
    std::vector<SubTaskId> depends_on;
    friend bool operator==(const SubTask&, const SubTask&) = default;

    std::int64_t state_size(double progress) const {
        return std::llround(state_base_bytes + state_slope_bytes * progress);
    }
};

struct Intent {
    IntentId intent_id;
    UserId user_id;
    SimTime submitted_at = 0;
    std::vector<SubTask> subtasks;  // executed sequentially in stored order
    QoERequirements qoe;
    SemanticTTL ttl;
    friend bool operator==(const Intent&, const Intent&) = default;

    std::int64_t total_work_units() const {
        std::int64_t sum = 0;
        for (const auto& st : subtasks) sum += st.work_units;
        return sum;
    }
    std::int64_t total_input_bytes() const {
        std::int64_t sum = 0;
        for (const auto& st : subtasks) sum += st.input_size_bytes;
        return sum;
    }
};

// Execution snapshot of one subtask on one agent. executed_units is the
// source of truth; progress is the derived fraction executed/work.
struct TaskState {
    SubTaskId subtask_id;
    double progress = 0.0;
    std::int64_t executed_units = 0;
    NodeId host_agent;
    SimTime checkpoint_time = 0;
    ContextTag context;
    friend bool operator==(const TaskState&, const TaskState&) = default;
};

struct NodeProfile {
    NodeId node_id;
    Vec2 position;
    double coverage_radius_m = 0.0;
    CapabilityClass capability = CapabilityClass::EdgeNode;
    double cpu_capacity_units_per_s = 1.0;
    std::int64_t mem_capacity_bytes = 0;
    bool is_rendezvous = false;
    friend bool operator==(const NodeProfile&, const NodeProfile&) = default;

    // Wall time of one work unit. Scenario validation guarantees this is an
    // exact positive integer so unit accounting never drifts.
    SimTime quantum_ms() const {
        return std::llround(1000.0 / cpu_capacity_units_per_s);
    }
};

struct NodeMetrics {
    NodeId node_id;
    SimTime sampled_at = 0;
    double cpu_load = 0.0;
    double mem_used = 0.0;
    std::int64_t bandwidth_avail_bps = 0;
    double rssi_dbm = 0.0;
    double snr_db = 0.0;
    double mobility_speed_mps = 0.0;  // user speed relative to this node
    TrafficType traffic_type = TrafficType::Interactive;
    friend bool operator==(const NodeMetrics&, const NodeMetrics&) = default;
};

// Linear scorer weights. Canonical form is normalized to sum 1; ranking and
// the multiplicative update both operate on the canonical form.
struct RankingWeights {
    double bandwidth = 1.0;
    double cpu_headroom = 1.0;
    double mem_headroom = 1.0;
    double snr = 1.0;
    double residence = 1.0;
    double traffic_match = 1.0;
    friend bool operator==(const RankingWeights&, const RankingWeights&) = default;

    double sum() const {
        return bandwidth + cpu_headroom + mem_headroom + snr + residence + traffic_match;
    }
};

// Returns w scaled to sum 1. Throws core::ValidationFailure if any weight is
// negative or all are zero.
RankingWeights canonical(const RankingWeights& w);

struct BucketStatsSnapshot {
    std::string bucket;
    std::int64_t success = 0;
    std::int64_t failure = 0;
    double mean_completion_latency_ms = 0.0;
    friend bool operator==(const BucketStatsSnapshot&, const BucketStatsSnapshot&) = default;
};

// "Refined runtime logic and learned policies" carried by a package: the
// canonical scorer weights plus the per-context outcome statistics.
struct PolicySnapshot {
    RankingWeights weights;
    std::vector<BucketStatsSnapshot> stats;
    friend bool operator==(const PolicySnapshot&, const PolicySnapshot&) = default;
};

// The four-part transfer unit: task state, policies, TTL, link parameters.
// state_bytes is fixed at build time from the subtask's state size function;
// size_bytes = state_bytes + policy_overhead_bytes + link_params size.
struct HandoverPackage {
    std::string package_id;
    TaskState task_state;
    PolicySnapshot policy;
    std::int64_t policy_overhead_bytes = 0;
    SemanticTTL ttl;
    std::vector<std::uint8_t> link_params;  // opaque MAC/RLC stand-in
    std::vector<NodeId> ranked_fallbacks;   // pre-ranked targets after the primary
    std::int64_t state_bytes = 0;
    std::int64_t size_bytes = 0;
    friend bool operator==(const HandoverPackage&, const HandoverPackage&) = default;
};

}  // namespace waan::core
