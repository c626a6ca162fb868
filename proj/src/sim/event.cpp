#include "waan/sim/event.hpp"

namespace waan::sim {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::IntentSubmitted: return "intent_submitted";
        case EventKind::ExecutionReady: return "execution_ready";
        case EventKind::ComputeQuantumDone: return "compute_quantum_done";
        case EventKind::UserMoved: return "user_moved";
        case EventKind::LinkLost: return "link_lost";
        case EventKind::LinkEstablished: return "link_established";
        case EventKind::HandoverTriggered: return "handover_triggered";
        case EventKind::MetricQuery: return "metric_query";
        case EventKind::MetricReply: return "metric_reply";
        case EventKind::SwarmRankDue: return "swarm_rank_due";
        case EventKind::PackageSent: return "package_sent";
        case EventKind::PackageDelivered: return "package_delivered";
        case EventKind::PackageLost: return "package_lost";
        case EventKind::HandoverAck: return "handover_ack";
        case EventKind::TTLExpired: return "ttl_expired";
        case EventKind::ResultDelivered: return "result_delivered";
        case EventKind::CheckpointDue: return "checkpoint_due";
        case EventKind::FaultInjected: return "fault_injected";
    }
    return "unknown";
}

}  // namespace waan::sim
