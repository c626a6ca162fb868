#pragma once
// Result record of one handover attempt chain. Kept free of protocol logic
// so the learning layer can consume outcomes without a dependency cycle.

#include "waan/core/types.hpp"

namespace waan::handover {

enum class HandoverResult { Success, FallbackSuccess, Abort };

const char* to_string(HandoverResult r);

struct HandoverOutcome {
    core::IntentId intent_id;
    core::NodeId source;
    core::NodeId target;  // node that finally resumed, or last attempted on Abort
    HandoverResult result = HandoverResult::Abort;
    int attempt_index = 0;        // 1 = primary target succeeded
    core::SimTime started_at = 0;  // trigger time
    core::SimTime finished_at = 0;  // ack time, or abort time
    double progress_at_transfer = 0.0;
    std::int64_t recomputed_units = 0;  // units re-executed because of this outcome
    friend bool operator==(const HandoverOutcome&, const HandoverOutcome&) = default;
};

}  // namespace waan::handover
