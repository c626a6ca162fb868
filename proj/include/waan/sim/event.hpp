#pragma once
// Event kinds, the event record, and the deterministic event queue. Events
// fire in (fire_at, seq) order; seq is assigned at scheduling time, so two
// events at the same millisecond fire in the order they were scheduled.

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "waan/core/error.hpp"
#include "waan/core/types.hpp"

namespace waan::sim {

enum class EventKind {
    IntentSubmitted,
    ExecutionReady,  // request or package content landed on a node; compute may start
    ComputeQuantumDone,
    UserMoved,
    LinkLost,
    LinkEstablished,
    HandoverTriggered,
    MetricQuery,
    MetricReply,
    SwarmRankDue,
    PackageSent,
    PackageDelivered,
    PackageLost,
    HandoverAck,  // source learns the target resumed; closes the handover
    TTLExpired,
    ResultDelivered,
    CheckpointDue,
    FaultInjected,
};

const char* to_string(EventKind k);

// Flat payload; each kind reads the fields it documents and ignores the
// rest. Keeping one struct avoids a 16-way variant without losing replay
// determinism, since events are value types.
struct Event {
    core::SimTime fire_at = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::UserMoved;

    core::IntentId intent_id;
    core::UserId user_id;
    core::NodeId node_id;  // origin / host
    core::NodeId peer_id;  // target / destination
    std::string query_id;
    std::string package_id;
    int attempt = 0;
    std::uint64_t epoch = 0;  // invalidates stale compute/transfer events
    core::SimTime aux_time = 0;
    std::int64_t aux_int = 0;
};

class EventQueue {
  public:
    // Stamps the sequence number and enqueues. Scheduling into the past is a
    // programming error and throws InvariantViolation.
    void schedule(Event e, core::SimTime fire_at) {
        if (fire_at < now_) {
            throw core::InvariantViolation("schedule: event at t=" + std::to_string(fire_at) +
                                           " is before current time t=" + std::to_string(now_));
        }
        e.fire_at = fire_at;
        e.seq = next_seq_++;
        heap_.push(std::move(e));
    }

    bool empty() const { return heap_.empty(); }

    core::SimTime next_fire_at() const { return heap_.top().fire_at; }

    // Removes and returns the next event, advancing the clock to it.
    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        now_ = e.fire_at;
        return e;
    }

    core::SimTime now() const { return now_; }

  private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    core::SimTime now_ = 0;
};

}  // namespace waan::sim
