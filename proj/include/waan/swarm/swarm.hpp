#pragma once
// Candidate discovery, metric collection, and ranking. Ranking is a
// normalized weighted sum over six components; every component lies in
// [0, 1] so the canonical weights directly express relative importance.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "waan/core/types.hpp"
#include "waan/sim/mobility.hpp"
#include "waan/sim/radio.hpp"
#include "waan/sim/rng.hpp"

namespace waan::swarm {

struct SwarmQuery {
    std::string query_id;
    core::NodeId origin;
    std::vector<core::NodeId> candidate_set;  // sorted, never contains origin
    core::SimTime issued_at = 0;
    core::SimTime deadline_ms = 0;
};

// Per-candidate normalized scores in [0, 1].
struct Components {
    double bandwidth = 0.0;
    double cpu_headroom = 0.0;
    double mem_headroom = 0.0;
    double snr = 0.0;
    double residence = 0.0;
    double traffic_match = 0.0;
    friend bool operator==(const Components&, const Components&) = default;

    double weighted(const core::RankingWeights& w) const {
        return w.bandwidth * bandwidth + w.cpu_headroom * cpu_headroom +
               w.mem_headroom * mem_headroom + w.snr * snr + w.residence * residence +
               w.traffic_match * traffic_match;
    }
};

struct CandidateScore {
    core::NodeId node_id;
    double score = 0.0;
    Components components;
    core::SimTime metrics_staleness_ms = 0;
    friend bool operator==(const CandidateScore&, const CandidateScore&) = default;
};

// All nodes within node-to-node link budget of `origin`, sorted by node_id.
// Coverage radii bound the user-serving area only, so they play no role
// here. Throws ValidationFailure when origin is not in the topology.
std::vector<core::NodeId> discover_neighbors(const std::vector<core::NodeProfile>& topology,
                                             const core::NodeId& origin,
                                             const sim::RadioModel& radio);

// How the collector sees the rest of the world; injected so the operation
// stays deterministic and testable outside the full simulation.
struct CollectEnv {
    std::function<bool(const core::NodeId&)> reachable;  // origin <-> candidate, both legs
    std::function<core::NodeMetrics(const core::NodeId&, core::SimTime)> sample;
    core::SimTime base_link_latency_ms = 0;
    core::SimTime reply_jitter_max_ms = 0;
};

struct MetricReplyPlan {
    core::NodeMetrics metrics;
    core::SimTime query_arrives_at = 0;
    core::SimTime reply_arrives_at = 0;
};

// Round trip per candidate: query out after one link latency, sample at
// arrival, reply back after another latency plus jitter. Replies that land
// after the deadline, and unreachable candidates, are omitted. Candidate
// order and RNG draw order follow candidate_set order exactly.
std::vector<MetricReplyPlan> collect_metrics(const SwarmQuery& query, const CollectEnv& env,
                                             sim::Rng& jitter_rng);

// Min/max windows mapping raw metrics onto [0, 1]; values clamp.
struct NormalizationBounds {
    std::int64_t bandwidth_min_bps = 0;
    std::int64_t bandwidth_max_bps = 10'000'000;
    double snr_min_db = 0.0;
    double snr_max_db = 60.0;
    core::SimTime residence_min_ms = 0;
    core::SimTime residence_max_ms = 120'000;
    friend bool operator==(const NormalizationBounds&, const NormalizationBounds&) = default;
};

// User-and-intent context a normalization needs beyond the raw metrics.
struct UserView {
    const sim::MobilityPath* path = nullptr;
    core::SimTime now = 0;
    core::SimTime horizon_ms = 0;
    core::TrafficType intent_traffic = core::TrafficType::Interactive;
};

// Raw metrics -> components. Residence time is derived analytically from the
// user's path through the candidate's coverage disc, then normalized.
Components normalize_metrics(const core::NodeMetrics& m, const core::NodeProfile& candidate,
                             const UserView& user, const NormalizationBounds& bounds);

// Scored candidates, best first. Ties break on the higher bandwidth
// component, then the lexicographically lower node_id. Weights are brought
// to canonical form internally, so any positive scaling of w ranks
// identically.
std::vector<CandidateScore> rank_candidates(
    const std::vector<std::pair<core::NodeMetrics, Components>>& candidates,
    const core::RankingWeights& weights, core::SimTime now);

}  // namespace waan::swarm
