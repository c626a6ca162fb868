#include "waan/handover/semantics.hpp"

namespace waan::handover {

double relevance(const core::ContextTag& current, const core::ContextTag& created) {
    if (current.intent_version != created.intent_version) return 0.0;
    if (current.zone_id != created.zone_id) return 0.5;
    return 1.0;
}

TtlVerdict check_ttl(const core::SemanticTTL& ttl, const core::ContextTag& current,
                     core::SimTime now) {
    TtlVerdict v;
    v.time_ok = now - ttl.created_at <= ttl.time_budget_ms;
    v.relevance = relevance(current, ttl.context);
    v.relevant = v.relevance >= ttl.relevance_threshold;
    v.valid = v.time_ok && v.relevant;
    return v;
}

}  // namespace waan::handover
