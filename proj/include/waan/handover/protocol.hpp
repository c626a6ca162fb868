#pragma once
// Pure pieces of the handover protocol: the per-intent session state machine,
// exit prediction, the trigger rule, and package assembly. The event-driven
// orchestration (transfers, retries, fallback walks) lives in the simulation
// runner, which drives these helpers from kernel events.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "waan/core/error.hpp"
#include "waan/core/types.hpp"
#include "waan/handover/outcome.hpp"
#include "waan/handover/semantics.hpp"
#include "waan/sim/mobility.hpp"
#include "waan/sim/radio.hpp"

namespace waan::handover {

struct NotConnected : core::Error {
    using core::Error::Error;
};

struct NoCandidate : core::Error {
    using core::Error::Error;
};

enum class SessionPhase {
    Executing,
    HandoverPreparing,
    Transferring,
    AwaitingAck,
    Resuming,
    Completed,
    Failed,
};

const char* to_string(SessionPhase p);

bool is_terminal(SessionPhase p);

// Phases that hold the exclusive right to execute the intent. AwaitingAck is
// excluded: at that point the target has already resumed and the source only
// waits for the acknowledgement before closing.
bool holds_execution(SessionPhase p);

bool can_transition(SessionPhase from, SessionPhase to);

struct AgentSession {
    core::IntentId intent_id;
    core::NodeId host_node;
    SessionPhase phase = SessionPhase::Executing;
    core::TaskState current_state;
    std::vector<core::NodeId> ranked_fallbacks;
    core::SimTime prepare_deadline = 0;  // predicted coverage exit driving the trigger
    core::SimTime phase_since = 0;
};

// Validated phase change; throws core::InvariantViolation on an edge the
// machine does not allow.
void transition(AgentSession& session, SessionPhase to, core::SimTime now);

// Earliest t >= now at which the user leaves the node's service area (the
// coverage disc clipped to radio range), or nullopt if that never happens
// before the path's horizon. Throws NotConnected if the user is not inside
// the service area at `now`.
std::optional<core::SimTime> predict_exit(const sim::MobilityPath& path,
                                          const core::NodeProfile& node,
                                          const sim::RadioModel& radio, core::SimTime now);

// Trigger rule: prepare as soon as the remaining residence fits the prepare
// window. A session with no predicted exit never triggers proactively.
bool should_trigger(std::optional<core::SimTime> predicted_exit, core::SimTime now,
                    core::SimTime t_prepare_ms);

// Default prepare window when the scenario does not pin one: twice the
// expected package transfer time plus the swarm reply deadline.
core::SimTime auto_t_prepare_ms(core::SimTime expected_transfer_ms,
                                core::SimTime swarm_deadline_ms);

struct PackageInputs {
    std::string package_id;
    core::PolicySnapshot policy;
    std::int64_t policy_overhead_bytes = 0;
    core::SemanticTTL ttl;                // the intent's TTL, copied unchanged
    std::vector<std::uint8_t> link_params;
    std::vector<core::NodeId> ranking;    // swarm ranking, primary target first
};

// Assemble the four-part transfer unit from a prepared session. The task
// state is copied verbatim (progress frozen at the last completed quantum);
// state_bytes follows the subtask's state size at that progress. Throws
// NoCandidate when the ranking is empty.
core::HandoverPackage build_package(const AgentSession& session, const core::SubTask& subtask,
                                    const PackageInputs& in);

// now - created_at <= budget AND relevance(ctx_now, ttl.context) >= threshold.
inline bool ttl_valid(const core::SemanticTTL& ttl, core::SimTime now,
                      const core::ContextTag& ctx_now) {
    return check_ttl(ttl, ctx_now, now).valid;
}

}  // namespace waan::handover
