#pragma once
// Semantic TTL evaluation shared by the handover protocol and the rendezvous
// store: a carried context is usable while its time budget holds AND it is
// still relevant to the consumer's current context.

#include "waan/core/types.hpp"

namespace waan::handover {

// Discrete relevance between the consumer's current context and the context
// a package or checkpoint was created under:
//   1.0  same zone, same intent version
//   0.5  same intent version, different zone
//   0.0  different intent version
double relevance(const core::ContextTag& current, const core::ContextTag& created);

struct TtlVerdict {
    bool time_ok = false;     // now - created_at <= time_budget_ms
    double relevance = 0.0;   // relevance(current, ttl.context)
    bool relevant = false;    // relevance >= ttl.relevance_threshold
    bool valid = false;       // time_ok && relevant
};

TtlVerdict check_ttl(const core::SemanticTTL& ttl, const core::ContextTag& current,
                     core::SimTime now);

}  // namespace waan::handover
