#pragma once
// Rendezvous node: bounded checkpoint cache plus append-only audit log of
// coordination decisions. Deterministic throughout — entries iterate in
// intent-id order and eviction follows a total order.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "waan/core/types.hpp"

namespace waan::rendezvous {

enum class AuditAction { Cache, Fetch, Evict, HandoverDecision, TTLVerdict };

const char* to_string(AuditAction a);

struct AuditRecord {
    core::SimTime t = 0;
    AuditAction action = AuditAction::Cache;
    core::IntentId intent_id;
    core::NodeId reporter;  // node that caused or reported the action
    std::string detail;
};

struct CachedCheckpoint {
    core::IntentId intent_id;
    core::TaskState state;
    core::SemanticTTL ttl;
    core::SimTime cached_at = 0;
    std::int64_t bytes = 0;
};

// Capacity-bounded store. When full, eviction picks the entry with the least
// remaining TTL budget, breaking ties by earliest cached_at, then by
// intent id. Time-expired entries are reaped first on insert and reaped
// lazily when a recover touches them.
class Store {
public:
    explicit Store(core::NodeId node_id, std::size_t capacity = 64);

    const core::NodeId& node_id() const { return node_id_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }

    // Insert or refresh the checkpoint for an intent. A newer checkpoint for
    // the same intent replaces the old one in place.
    void cache(const CachedCheckpoint& cp, core::SimTime now);

    // Look up the checkpoint for an intent and validate its TTL against the
    // requester's current context. An entry that fails validation is evicted
    // and the call reports a miss.
    std::optional<CachedCheckpoint> recover(const core::IntentId& intent_id,
                                            const core::ContextTag& current, core::SimTime now);

    bool contains(const core::IntentId& intent_id) const;

    // Record a coordination fact (handover decision, TTL verdict) reported by
    // an agent to this rendezvous point.
    void report(core::SimTime t, AuditAction action, const core::IntentId& intent_id,
                const core::NodeId& reporter, std::string detail);

    const std::vector<AuditRecord>& audit_log() const { return audit_; }

    // Entries in intent-id order.
    std::vector<CachedCheckpoint> entries() const;

private:
    void reap_expired(core::SimTime now);
    void evict_one(core::SimTime now);
    void append(core::SimTime t, AuditAction action, const core::IntentId& intent_id,
                const core::NodeId& reporter, std::string detail);

    core::NodeId node_id_;
    std::size_t capacity_;
    std::map<core::IntentId, CachedCheckpoint> entries_;
    std::vector<AuditRecord> audit_;
};

}  // namespace waan::rendezvous
