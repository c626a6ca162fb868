#pragma once
// Canonical serialization of core types. Field order is fixed by insertion
// order into ordered_json; the same object always serializes to the same
// bytes, which is what trace determinism and round-trip tests rely on.
// The full record layout is documented in docs/schemas.md.

#include <json.hpp>

#include "waan/core/ops.hpp"
#include "waan/core/types.hpp"

namespace waan::core {

using ojson = nlohmann::ordered_json;

void to_json(ojson& j, const Vec2& v);
void from_json(const ojson& j, Vec2& v);

void to_json(ojson& j, const ContextTag& c);
void from_json(const ojson& j, ContextTag& c);

void to_json(ojson& j, const QoERequirements& q);
void from_json(const ojson& j, QoERequirements& q);

void to_json(ojson& j, const SemanticTTL& t);
void from_json(const ojson& j, SemanticTTL& t);

void to_json(ojson& j, const SubTask& s);
void from_json(const ojson& j, SubTask& s);

void to_json(ojson& j, const Intent& i);
void from_json(const ojson& j, Intent& i);

void to_json(ojson& j, const TaskState& t);
void from_json(const ojson& j, TaskState& t);

void to_json(ojson& j, const NodeProfile& n);
void from_json(const ojson& j, NodeProfile& n);

void to_json(ojson& j, const NodeMetrics& m);
void from_json(const ojson& j, NodeMetrics& m);

void to_json(ojson& j, const RankingWeights& w);
void from_json(const ojson& j, RankingWeights& w);

void to_json(ojson& j, const BucketStatsSnapshot& b);
void from_json(const ojson& j, BucketStatsSnapshot& b);

void to_json(ojson& j, const PolicySnapshot& p);
void from_json(const ojson& j, PolicySnapshot& p);

void to_json(ojson& j, const HandoverPackage& p);
void from_json(const ojson& j, HandoverPackage& p);

// One line of JSON, no trailing newline.
template <typename T>
std::string to_line(const T& value) {
    ojson j = value;
    return j.dump();
}

// FNV-1a 64-bit over a byte string; used to fingerprint canonical forms.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace waan::core
