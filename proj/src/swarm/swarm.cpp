#include "waan/swarm/swarm.hpp"

#include <algorithm>

#include "waan/core/error.hpp"
#include "waan/core/ops.hpp"

namespace waan::swarm {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double window(double value, double lo, double hi) {
    if (hi <= lo) return 0.0;
    return clamp01((value - lo) / (hi - lo));
}

}  // namespace

std::vector<core::NodeId> discover_neighbors(const std::vector<core::NodeProfile>& topology,
                                             const core::NodeId& origin,
                                             const sim::RadioModel& radio) {
    const core::NodeProfile* self = nullptr;
    for (const auto& n : topology) {
        if (n.node_id == origin) self = &n;
    }
    if (self == nullptr) {
        throw core::ValidationFailure({{"origin", "unknown node '" + origin + "'"}});
    }
    std::vector<core::NodeId> out;
    for (const auto& n : topology) {
        if (n.node_id == origin) continue;
        if (sim::node_link(radio, *self, n)) out.push_back(n.node_id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<MetricReplyPlan> collect_metrics(const SwarmQuery& query, const CollectEnv& env,
                                             sim::Rng& jitter_rng) {
    std::vector<MetricReplyPlan> out;
    for (const auto& candidate : query.candidate_set) {
        // Draw jitter unconditionally so one unreachable candidate does not
        // shift every later candidate's jitter.
        const core::SimTime jitter =
            env.reply_jitter_max_ms > 0 ? jitter_rng.uniform_int(0, env.reply_jitter_max_ms) : 0;
        if (!env.reachable(candidate)) continue;
        MetricReplyPlan plan;
        plan.query_arrives_at = query.issued_at + env.base_link_latency_ms;
        plan.reply_arrives_at = plan.query_arrives_at + env.base_link_latency_ms + jitter;
        if (plan.reply_arrives_at > query.issued_at + query.deadline_ms) continue;
        plan.metrics = env.sample(candidate, plan.query_arrives_at);
        if (plan.metrics.sampled_at > plan.query_arrives_at) {
            throw core::InvariantViolation("collect_metrics: sample from the future");
        }
        out.push_back(std::move(plan));
    }
    return out;
}

Components normalize_metrics(const core::NodeMetrics& m, const core::NodeProfile& candidate,
                             const UserView& user, const NormalizationBounds& bounds) {
    Components c;
    c.bandwidth = window(static_cast<double>(m.bandwidth_avail_bps),
                         static_cast<double>(bounds.bandwidth_min_bps),
                         static_cast<double>(bounds.bandwidth_max_bps));
    c.cpu_headroom = clamp01(1.0 - m.cpu_load);
    c.mem_headroom = clamp01(1.0 - m.mem_used);
    c.snr = window(m.snr_db, bounds.snr_min_db, bounds.snr_max_db);
    const core::SimTime res =
        sim::residence_ms(*user.path, candidate.position, candidate.coverage_radius_m, user.now,
                          user.horizon_ms);
    c.residence = window(static_cast<double>(res), static_cast<double>(bounds.residence_min_ms),
                         static_cast<double>(bounds.residence_max_ms));
    c.traffic_match = m.traffic_type == user.intent_traffic ? 1.0 : 0.0;
    return c;
}

std::vector<CandidateScore> rank_candidates(
    const std::vector<std::pair<core::NodeMetrics, Components>>& candidates,
    const core::RankingWeights& weights, core::SimTime now) {
    const core::RankingWeights w = core::canonical(weights);
    std::vector<CandidateScore> out;
    out.reserve(candidates.size());
    for (const auto& [metrics, components] : candidates) {
        CandidateScore s;
        s.node_id = metrics.node_id;
        s.components = components;
        s.score = components.weighted(w);
        s.metrics_staleness_ms = now - metrics.sampled_at;
        if (s.metrics_staleness_ms < 0) {
            throw core::InvariantViolation("rank_candidates: metrics sampled in the future");
        }
        out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(), [](const CandidateScore& a, const CandidateScore& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.components.bandwidth != b.components.bandwidth)
            return a.components.bandwidth > b.components.bandwidth;
        return a.node_id < b.node_id;
    });
    return out;
}

}  // namespace waan::swarm
