#pragma once
// Outcome-driven adaptation: per-context handover statistics, the
// multiplicative-weights update for the candidate scorer, few-shot success
// priors, and the state-vs-full-offload transfer decision.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "waan/core/types.hpp"
#include "waan/handover/outcome.hpp"
#include "waan/sim/radio.hpp"
#include "waan/swarm/swarm.hpp"

namespace waan::adapt {

enum class SpeedBand { Slow, Medium, Fast };

const char* to_string(SpeedBand b);

// Slow < 1 m/s, Medium 1..5 m/s inclusive, Fast > 5 m/s.
SpeedBand speed_band(double speed_mps);

// Context bucket for outcome statistics: traffic type x user speed band x
// target capability class.
struct BucketKey {
    core::TrafficType traffic = core::TrafficType::Interactive;
    SpeedBand band = SpeedBand::Slow;
    core::CapabilityClass target = core::CapabilityClass::EdgeNode;
};

// Stable string form, e.g. "interactive/medium/edge_node". Used as the map
// key and in serialized policy snapshots.
std::string to_string(const BucketKey& key);

struct BucketStats {
    std::int64_t success = 0;
    std::int64_t failure = 0;
    double latency_sum_ms = 0.0;

    std::int64_t samples() const { return success + failure; }
};

struct OutcomeRecord {
    handover::HandoverOutcome outcome;
    std::string bucket;          // to_string(BucketKey) at decision time
    bool qoe_met = false;        // intent finished within its latency budget
    double completion_latency_ms = 0.0;
};

// Append-only log plus per-bucket aggregates. std::map keeps bucket order
// deterministic for snapshots and serialization.
struct OutcomeLog {
    std::vector<OutcomeRecord> records;
    std::map<std::string, BucketStats> buckets;
    std::int64_t global_success = 0;
    std::int64_t global_failure = 0;
};

// A handover counts as a success when some target resumed the task, even via
// a fallback; only a full abort counts as failure.
bool counts_as_success(handover::HandoverResult r);

void record_outcome(OutcomeLog& log, const OutcomeRecord& rec);

// Multiplicative update: each weight is scaled by exp(eta * sign * c_i) where
// c_i is that component's normalized value for the chosen target and sign is
// +1 when the handover succeeded and met QoE, -1 otherwise. The result is
// re-normalized to the canonical sum-1 form, so a component that contributed
// strongly to a good pick gains share and vice versa.
core::RankingWeights update_weights(const core::RankingWeights& weights, bool positive,
                                    const swarm::Components& components, double eta);

// Laplace-smoothed success estimate (s+1)/(s+f+2) for the bucket, available
// once the bucket holds at least k_min samples. Falls back to the global
// Laplace estimate when the bucket is thin but the log is not, and to the
// uninformed 0.5 otherwise. Never returns 0 or 1.
double few_shot_prior(const OutcomeLog& log, const std::string& bucket, std::int64_t k_min);

enum class TransferKind { StateTransfer, FullOffload };

const char* to_string(TransferKind k);

struct TransferCostContext {
    sim::RadioModel radio;
    std::int64_t bandwidth_bps = 0;    // min(source, target) uplink
    core::SimTime quantum_ms = 0;      // per-unit wall time at the target
    std::int64_t executed_units = 0;   // units that full offload recomputes
    double success_prior = 0.5;        // few_shot_prior for the bucket
};

struct TransferDecision {
    TransferKind kind = TransferKind::StateTransfer;
    double state_cost_ms = 0.0;  // expected, i.e. transfer time / prior
    double full_cost_ms = 0.0;
    double prior = 0.5;
};

// Expected-cost comparison. State transfer ships package_bytes and risks
// retries (cost divided by the success prior); full offload ships the raw
// input and repays every executed unit at the target's quantum. Ties keep
// the accumulated state.
TransferDecision decide_transfer_kind(std::int64_t package_bytes, std::int64_t input_bytes,
                                      const TransferCostContext& ctx);

// Deterministic snapshot of the learned state for inclusion in a package.
core::PolicySnapshot policy_snapshot(const OutcomeLog& log, const core::RankingWeights& weights);

}  // namespace waan::adapt
