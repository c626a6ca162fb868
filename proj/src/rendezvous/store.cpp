#include "waan/rendezvous/store.hpp"

#include <utility>

#include "waan/core/error.hpp"
#include "waan/handover/semantics.hpp"

namespace waan::rendezvous {

const char* to_string(AuditAction a) {
    switch (a) {
        case AuditAction::Cache: return "cache";
        case AuditAction::Fetch: return "fetch";
        case AuditAction::Evict: return "evict";
        case AuditAction::HandoverDecision: return "handover_decision";
        case AuditAction::TTLVerdict: return "ttl_verdict";
    }
    return "unknown";
}

Store::Store(core::NodeId node_id, std::size_t capacity)
    : node_id_(std::move(node_id)), capacity_(capacity) {
    if (capacity_ == 0) throw core::InvariantViolation("rendezvous store capacity must be >= 1");
}

void Store::append(core::SimTime t, AuditAction action, const core::IntentId& intent_id,
                   const core::NodeId& reporter, std::string detail) {
    audit_.push_back({t, action, intent_id, reporter, std::move(detail)});
}

void Store::reap_expired(core::SimTime now) {
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (now - it->second.ttl.created_at > it->second.ttl.time_budget_ms) {
            append(now, AuditAction::Evict, it->first, node_id_, "expired");
            it = entries_.erase(it);
        } else {
            ++it;
        }
    }
}

void Store::evict_one(core::SimTime now) {
    // Total order: least remaining budget, then earliest cached_at, then id.
    auto victim = entries_.begin();
    for (auto it = std::next(entries_.begin()); it != entries_.end(); ++it) {
        const auto rem_it = it->second.ttl.expires_at() - now;
        const auto rem_v = victim->second.ttl.expires_at() - now;
        if (rem_it < rem_v ||
            (rem_it == rem_v && it->second.cached_at < victim->second.cached_at)) {
            victim = it;
        }
        // Map iteration is id-ordered, so on a full tie the earlier entry
        // (smaller intent id) is already the victim.
    }
    append(now, AuditAction::Evict, victim->first, node_id_, "capacity");
    entries_.erase(victim);
}

void Store::cache(const CachedCheckpoint& cp, core::SimTime now) {
    auto it = entries_.find(cp.intent_id);
    if (it != entries_.end()) {
        it->second = cp;
        append(now, AuditAction::Cache, cp.intent_id, cp.state.host_agent, "refresh");
        return;
    }
    if (entries_.size() >= capacity_) {
        reap_expired(now);
        while (entries_.size() >= capacity_) evict_one(now);
    }
    entries_.emplace(cp.intent_id, cp);
    append(now, AuditAction::Cache, cp.intent_id, cp.state.host_agent, "insert");
}

std::optional<CachedCheckpoint> Store::recover(const core::IntentId& intent_id,
                                               const core::ContextTag& current,
                                               core::SimTime now) {
    auto it = entries_.find(intent_id);
    if (it == entries_.end()) {
        append(now, AuditAction::Fetch, intent_id, node_id_, "miss");
        return std::nullopt;
    }
    const auto verdict = handover::check_ttl(it->second.ttl, current, now);
    if (!verdict.valid) {
        append(now, AuditAction::Evict, intent_id, node_id_,
               verdict.time_ok ? "irrelevant" : "expired");
        entries_.erase(it);
        append(now, AuditAction::Fetch, intent_id, node_id_, "miss");
        return std::nullopt;
    }
    append(now, AuditAction::Fetch, intent_id, node_id_, "hit");
    return it->second;
}

bool Store::contains(const core::IntentId& intent_id) const {
    return entries_.count(intent_id) > 0;
}

void Store::report(core::SimTime t, AuditAction action, const core::IntentId& intent_id,
                   const core::NodeId& reporter, std::string detail) {
    append(t, action, intent_id, reporter, std::move(detail));
}

std::vector<CachedCheckpoint> Store::entries() const {
    std::vector<CachedCheckpoint> out;
    out.reserve(entries_.size());
    for (const auto& [id, cp] : entries_) out.push_back(cp);
    return out;
}

}  // namespace waan::rendezvous
