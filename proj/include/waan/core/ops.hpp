#pragma once
// Pure operations on core types: intent validation, intent templating, and
// package sizing. None of these touch simulation state.

#include <string>
#include <vector>

#include "waan/core/error.hpp"
#include "waan/core/types.hpp"

namespace waan::core {

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Checks an intent against all structural rules: non-empty ids and subtask
// list, positive work units, non-negative sizes, a state size function that
// is non-negative on [0, 1], resolvable dependency ids, and an acyclic
// dependency graph. Every violation is reported.
ValidationResult validate_intent(const Intent& intent);

// Template from which concrete intents are minted. depends_on entries are
// indices into subtasks.
struct SubTaskTemplate {
    SubTaskKind kind = SubTaskKind::Generic;
    std::int64_t work_units = 1;
    std::int64_t input_size_bytes = 0;
    double state_base_bytes = 0.0;
    double state_slope_bytes = 0.0;
    std::vector<std::size_t> depends_on;
    friend bool operator==(const SubTaskTemplate&, const SubTaskTemplate&) = default;
};

struct IntentTemplate {
    QoERequirements qoe;
    SimTime time_budget_ms = 0;
    double relevance_threshold = 0.0;
    std::string zone_id;
    std::vector<SubTaskTemplate> subtasks;
    friend bool operator==(const IntentTemplate&, const IntentTemplate&) = default;
};

// Mints a concrete intent: ids are "<user>-i<index>" and "<intent>-s<k>",
// the TTL clock starts at now, and the context tag is (zone, version 1).
// Subtask order and dependency edges follow the template exactly.
// Throws ValidationFailure when the template has no subtasks.
Intent decompose(const IntentTemplate& tmpl, const UserId& user, SimTime now,
                 std::uint64_t intent_index);

// Total serialized size of a package: frozen state bytes + fixed policy
// overhead + opaque link parameter bytes.
std::int64_t package_size(const HandoverPackage& pkg);

}  // namespace waan::core
