#include "waan/handover/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace waan::handover {

const char* to_string(HandoverResult r) {
    switch (r) {
        case HandoverResult::Success: return "success";
        case HandoverResult::FallbackSuccess: return "fallback_success";
        case HandoverResult::Abort: return "abort";
    }
    return "unknown";
}

const char* to_string(SessionPhase p) {
    switch (p) {
        case SessionPhase::Executing: return "executing";
        case SessionPhase::HandoverPreparing: return "handover_preparing";
        case SessionPhase::Transferring: return "transferring";
        case SessionPhase::AwaitingAck: return "awaiting_ack";
        case SessionPhase::Resuming: return "resuming";
        case SessionPhase::Completed: return "completed";
        case SessionPhase::Failed: return "failed";
    }
    return "unknown";
}

bool is_terminal(SessionPhase p) {
    return p == SessionPhase::Completed || p == SessionPhase::Failed;
}

bool holds_execution(SessionPhase p) {
    switch (p) {
        case SessionPhase::Executing:
        case SessionPhase::HandoverPreparing:
        case SessionPhase::Transferring:
        case SessionPhase::Resuming:
            return true;
        default:
            return false;
    }
}

bool can_transition(SessionPhase from, SessionPhase to) {
    using P = SessionPhase;
    switch (from) {
        case P::Resuming:
            return to == P::Executing || to == P::Failed;
        case P::Executing:
            return to == P::HandoverPreparing || to == P::Completed || to == P::Failed;
        case P::HandoverPreparing:
            // Back to Executing covers a cancelled trigger (no candidate but
            // coverage persists).
            return to == P::Transferring || to == P::Executing || to == P::Failed;
        case P::Transferring:
            return to == P::AwaitingAck || to == P::Failed;
        case P::AwaitingAck:
            return to == P::Completed || to == P::Failed;
        case P::Completed:
        case P::Failed:
            return false;
    }
    return false;
}

void transition(AgentSession& session, SessionPhase to, core::SimTime now) {
    if (!can_transition(session.phase, to)) {
        throw core::InvariantViolation("illegal session transition " +
                                       std::string(to_string(session.phase)) + " -> " +
                                       std::string(to_string(to)) + " for intent " +
                                       session.intent_id);
    }
    session.phase = to;
    session.phase_since = now;
}

std::optional<core::SimTime> predict_exit(const sim::MobilityPath& path,
                                          const core::NodeProfile& node,
                                          const sim::RadioModel& radio, core::SimTime now) {
    const double service_radius = std::min(node.coverage_radius_m, sim::radio_range_m(radio));
    const auto pos = sim::position_at(path, now);
    if (core::distance(pos, node.position) > service_radius) {
        throw NotConnected("predict_exit: user outside service area of " + node.node_id);
    }
    // Paths are stationary after their final waypoint, so any real exit
    // happens at or before the path's end; the path end is the horizon.
    const core::SimTime horizon = std::max(now, path.waypoints.back().at_ms);
    return sim::first_exit_ms(path, node.position, service_radius, now, horizon);
}

bool should_trigger(std::optional<core::SimTime> predicted_exit, core::SimTime now,
                    core::SimTime t_prepare_ms) {
    if (!predicted_exit.has_value()) return false;
    return *predicted_exit - now <= t_prepare_ms;
}

core::SimTime auto_t_prepare_ms(core::SimTime expected_transfer_ms,
                                core::SimTime swarm_deadline_ms) {
    return 2 * expected_transfer_ms + swarm_deadline_ms;
}

core::HandoverPackage build_package(const AgentSession& session, const core::SubTask& subtask,
                                    const PackageInputs& in) {
    if (session.phase != SessionPhase::HandoverPreparing) {
        throw core::InvariantViolation("build_package: session not in handover_preparing");
    }
    if (in.ranking.empty()) {
        throw NoCandidate("build_package: ranking is empty for intent " + session.intent_id);
    }
    if (session.current_state.subtask_id != subtask.subtask_id) {
        throw core::InvariantViolation("build_package: state does not match subtask");
    }
    // Progress must sit on a completed-quantum boundary so the target resumes
    // at an exact unit count.
    const double implied = session.current_state.progress * static_cast<double>(subtask.work_units);
    if (std::abs(implied - static_cast<double>(session.current_state.executed_units)) > 1e-6) {
        throw core::InvariantViolation("build_package: progress not at a quantum boundary");
    }

    core::HandoverPackage pkg;
    pkg.package_id = in.package_id;
    pkg.task_state = session.current_state;
    pkg.policy = in.policy;
    pkg.policy_overhead_bytes = in.policy_overhead_bytes;
    pkg.ttl = in.ttl;
    pkg.link_params = in.link_params;
    pkg.ranked_fallbacks.assign(in.ranking.begin() + 1, in.ranking.end());
    pkg.state_bytes = subtask.state_size(session.current_state.progress);
    pkg.size_bytes = pkg.state_bytes + pkg.policy_overhead_bytes +
                     static_cast<std::int64_t>(pkg.link_params.size());
    return pkg;
}

}  // namespace waan::handover
