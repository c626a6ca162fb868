#pragma once
// The event trace: an append-only list of JSON records, one per line when
// serialized. Every report is derived from the trace alone, so the trace is
// the public contract of a run. Record layouts live in docs/schemas.md.

#include <string>

#include "waan/core/json.hpp"

namespace waan::sim {

inline constexpr const char* kTraceSchema = "waan-trace/1";
inline constexpr const char* kAuditSchema = "waan-audit/1";

struct EventTrace {
    std::vector<core::ojson> records;

    std::string to_jsonl() const {
        std::string out;
        for (const auto& r : records) {
            out += r.dump();
            out += '\n';
        }
        return out;
    }
};

// Builds trace records with non-decreasing timestamps and a dense sequence.
class TraceWriter {
  public:
    // Starts a record {t, seq, kind}; the caller appends payload fields in
    // canonical order before emitting the next record.
    core::ojson& emit(core::SimTime t, const char* kind) {
        if (t < last_t_) {
            throw core::InvariantViolation("trace: record at t=" + std::to_string(t) +
                                           " after t=" + std::to_string(last_t_));
        }
        last_t_ = t;
        trace_.records.push_back(core::ojson{{"t", t}, {"seq", next_seq_++}, {"kind", kind}});
        return trace_.records.back();
    }

    const EventTrace& trace() const { return trace_; }
    EventTrace take() { return std::move(trace_); }

  private:
    EventTrace trace_;
    std::uint64_t next_seq_ = 0;
    core::SimTime last_t_ = 0;
};

}  // namespace waan::sim
