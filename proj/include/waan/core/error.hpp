#pragma once
// Error taxonomy. Configuration problems surface as ParseError or
// ValidationFailure (CLI exit code 1); broken runtime assumptions surface as
// InvariantViolation (CLI exit code 2). Everything derives from Error so
// callers can catch the family.

#include <stdexcept>
#include <string>
#include <vector>

namespace waan::core {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file or unknown/duplicate field. The message names the
// offending field or line.
struct ParseError : Error {
    using Error::Error;
};

// One violated validation rule, attributed to a field.
struct Violation {
    std::string field;
    std::string rule;
    friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string join_violations(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) {
        if (!out.empty()) out += "; ";
        out += v.field + ": " + v.rule;
    }
    return out;
}

// Structurally valid input that breaks semantic rules. Carries every
// violation found, not just the first.
struct ValidationFailure : Error {
    std::vector<Violation> violations;
    explicit ValidationFailure(std::vector<Violation> vs)
        : Error("validation failed: " + join_violations(vs)), violations(std::move(vs)) {}
    ValidationFailure(std::initializer_list<Violation> vs)
        : ValidationFailure(std::vector<Violation>(vs)) {}
};

// A runtime state the simulation must never reach.
struct InvariantViolation : Error {
    using Error::Error;
};

// Trace or store written under a different schema version.
struct SchemaMismatch : Error {
    using Error::Error;
};

}  // namespace waan::core
