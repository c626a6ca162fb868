#include "waan/adapt/adapt.hpp"

#include <cmath>

#include "waan/core/error.hpp"

namespace waan::adapt {

const char* to_string(SpeedBand b) {
    switch (b) {
        case SpeedBand::Slow: return "slow";
        case SpeedBand::Medium: return "medium";
        case SpeedBand::Fast: return "fast";
    }
    return "unknown";
}

SpeedBand speed_band(double speed_mps) {
    if (speed_mps < 1.0) return SpeedBand::Slow;
    if (speed_mps <= 5.0) return SpeedBand::Medium;
    return SpeedBand::Fast;
}

std::string to_string(const BucketKey& key) {
    std::string s = core::to_string(key.traffic);
    s += '/';
    s += to_string(key.band);
    s += '/';
    s += core::to_string(key.target);
    return s;
}

bool counts_as_success(handover::HandoverResult r) {
    return r != handover::HandoverResult::Abort;
}

void record_outcome(OutcomeLog& log, const OutcomeRecord& rec) {
    auto& stats = log.buckets[rec.bucket];
    if (counts_as_success(rec.outcome.result)) {
        ++stats.success;
        ++log.global_success;
    } else {
        ++stats.failure;
        ++log.global_failure;
    }
    stats.latency_sum_ms += rec.completion_latency_ms;
    log.records.push_back(rec);
}

core::RankingWeights update_weights(const core::RankingWeights& weights, bool positive,
                                    const swarm::Components& components, double eta) {
    if (eta < 0.0) throw core::InvariantViolation("update_weights: negative learning rate");
    const double sign = positive ? 1.0 : -1.0;
    core::RankingWeights w = weights;
    w.bandwidth *= std::exp(eta * sign * components.bandwidth);
    w.cpu_headroom *= std::exp(eta * sign * components.cpu_headroom);
    w.mem_headroom *= std::exp(eta * sign * components.mem_headroom);
    w.snr *= std::exp(eta * sign * components.snr);
    w.residence *= std::exp(eta * sign * components.residence);
    w.traffic_match *= std::exp(eta * sign * components.traffic_match);
    return core::canonical(w);
}

namespace {

double laplace(std::int64_t success, std::int64_t failure) {
    return static_cast<double>(success + 1) / static_cast<double>(success + failure + 2);
}

}  // namespace

double few_shot_prior(const OutcomeLog& log, const std::string& bucket, std::int64_t k_min) {
    if (k_min < 1) throw core::InvariantViolation("few_shot_prior: k_min must be >= 1");
    auto it = log.buckets.find(bucket);
    if (it != log.buckets.end() && it->second.samples() >= k_min) {
        return laplace(it->second.success, it->second.failure);
    }
    if (log.global_success + log.global_failure > 0) {
        return laplace(log.global_success, log.global_failure);
    }
    return 0.5;
}

const char* to_string(TransferKind k) {
    switch (k) {
        case TransferKind::StateTransfer: return "state_transfer";
        case TransferKind::FullOffload: return "full_offload";
    }
    return "unknown";
}

TransferDecision decide_transfer_kind(std::int64_t package_bytes, std::int64_t input_bytes,
                                      const TransferCostContext& ctx) {
    if (ctx.success_prior <= 0.0 || ctx.success_prior > 1.0) {
        throw core::InvariantViolation("decide_transfer_kind: prior outside (0,1]");
    }
    if (ctx.quantum_ms <= 0) {
        throw core::InvariantViolation("decide_transfer_kind: non-positive quantum");
    }
    if (ctx.executed_units < 0) {
        throw core::InvariantViolation("decide_transfer_kind: negative executed units");
    }
    TransferDecision d;
    d.prior = ctx.success_prior;
    const auto t_state =
        sim::transfer_time_ms(ctx.radio, package_bytes, ctx.bandwidth_bps, ctx.bandwidth_bps);
    const auto t_input =
        sim::transfer_time_ms(ctx.radio, input_bytes, ctx.bandwidth_bps, ctx.bandwidth_bps);
    d.state_cost_ms = static_cast<double>(t_state) / ctx.success_prior;
    d.full_cost_ms = static_cast<double>(t_input) +
                     static_cast<double>(ctx.executed_units) * static_cast<double>(ctx.quantum_ms);
    d.kind = d.full_cost_ms < d.state_cost_ms ? TransferKind::FullOffload
                                              : TransferKind::StateTransfer;
    return d;
}

core::PolicySnapshot policy_snapshot(const OutcomeLog& log, const core::RankingWeights& weights) {
    core::PolicySnapshot snap;
    snap.weights = core::canonical(weights);
    snap.stats.reserve(log.buckets.size());
    for (const auto& [bucket, stats] : log.buckets) {
        core::BucketStatsSnapshot s;
        s.bucket = bucket;
        s.success = stats.success;
        s.failure = stats.failure;
        s.mean_completion_latency_ms =
            stats.samples() > 0 ? stats.latency_sum_ms / static_cast<double>(stats.samples()) : 0.0;
        snap.stats.push_back(std::move(s));
    }
    return snap;
}

}  // namespace waan::adapt
