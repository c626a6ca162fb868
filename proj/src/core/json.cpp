#include "waan/core/json.hpp"

#include <iomanip>
#include <sstream>

namespace waan::core {

namespace {

std::string bytes_to_hex(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::vector<std::uint8_t> hex_to_bytes(const std::string& hex) {
    if (hex.size() % 2 != 0) throw ParseError("link_params hex string has odd length");
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        throw ParseError("link_params hex string has invalid digit");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    }
    return out;
}

}  // namespace

void to_json(ojson& j, const Vec2& v) {
    j = ojson{{"x", v.x}, {"y", v.y}};
}
void from_json(const ojson& j, Vec2& v) {
    v.x = j.at("x").get<double>();
    v.y = j.at("y").get<double>();
}

void to_json(ojson& j, const ContextTag& c) {
    j = ojson{{"zone_id", c.zone_id}, {"intent_version", c.intent_version}};
}
void from_json(const ojson& j, ContextTag& c) {
    c.zone_id = j.at("zone_id").get<std::string>();
    c.intent_version = j.at("intent_version").get<std::uint32_t>();
}

void to_json(ojson& j, const QoERequirements& q) {
    j = ojson{{"max_latency_ms", q.max_latency_ms},
              {"min_accuracy", q.min_accuracy},
              {"traffic_type", to_string(q.traffic_type)}};
}
void from_json(const ojson& j, QoERequirements& q) {
    q.max_latency_ms = j.at("max_latency_ms").get<SimTime>();
    q.min_accuracy = j.at("min_accuracy").get<double>();
    q.traffic_type = traffic_from_string(j.at("traffic_type").get<std::string>());
}

void to_json(ojson& j, const SemanticTTL& t) {
    j = ojson{{"created_at", t.created_at},
              {"time_budget_ms", t.time_budget_ms},
              {"context", t.context},
              {"relevance_threshold", t.relevance_threshold}};
}
void from_json(const ojson& j, SemanticTTL& t) {
    t.created_at = j.at("created_at").get<SimTime>();
    t.time_budget_ms = j.at("time_budget_ms").get<SimTime>();
    t.context = j.at("context").get<ContextTag>();
    t.relevance_threshold = j.at("relevance_threshold").get<double>();
}

void to_json(ojson& j, const SubTask& s) {
    j = ojson{{"subtask_id", s.subtask_id},
              {"kind", to_string(s.kind)},
              {"work_units", s.work_units},
              {"input_size_bytes", s.input_size_bytes},
              {"state_base_bytes", s.state_base_bytes},
              {"state_slope_bytes", s.state_slope_bytes},
              {"depends_on", s.depends_on}};
}
void from_json(const ojson& j, SubTask& s) {
    s.subtask_id = j.at("subtask_id").get<SubTaskId>();
    s.kind = subtask_kind_from_string(j.at("kind").get<std::string>());
    s.work_units = j.at("work_units").get<std::int64_t>();
    s.input_size_bytes = j.at("input_size_bytes").get<std::int64_t>();
    s.state_base_bytes = j.at("state_base_bytes").get<double>();
    s.state_slope_bytes = j.at("state_slope_bytes").get<double>();
    s.depends_on = j.at("depends_on").get<std::vector<SubTaskId>>();
}

void to_json(ojson& j, const Intent& i) {
    j = ojson{{"intent_id", i.intent_id},
              {"user_id", i.user_id},
              {"submitted_at", i.submitted_at},
              {"subtasks", i.subtasks},
              {"qoe", i.qoe},
              {"ttl", i.ttl}};
}
void from_json(const ojson& j, Intent& i) {
    i.intent_id = j.at("intent_id").get<IntentId>();
    i.user_id = j.at("user_id").get<UserId>();
    i.submitted_at = j.at("submitted_at").get<SimTime>();
    i.subtasks = j.at("subtasks").get<std::vector<SubTask>>();
    i.qoe = j.at("qoe").get<QoERequirements>();
    i.ttl = j.at("ttl").get<SemanticTTL>();
}

void to_json(ojson& j, const TaskState& t) {
    j = ojson{{"subtask_id", t.subtask_id},
              {"progress", t.progress},
              {"executed_units", t.executed_units},
              {"host_agent", t.host_agent},
              {"checkpoint_time", t.checkpoint_time},
              {"context", t.context}};
}
void from_json(const ojson& j, TaskState& t) {
    t.subtask_id = j.at("subtask_id").get<SubTaskId>();
    t.progress = j.at("progress").get<double>();
    t.executed_units = j.at("executed_units").get<std::int64_t>();
    t.host_agent = j.at("host_agent").get<NodeId>();
    t.checkpoint_time = j.at("checkpoint_time").get<SimTime>();
    t.context = j.at("context").get<ContextTag>();
}

void to_json(ojson& j, const NodeProfile& n) {
    j = ojson{{"node_id", n.node_id},
              {"position", n.position},
              {"coverage_radius_m", n.coverage_radius_m},
              {"capability", to_string(n.capability)},
              {"cpu_capacity_units_per_s", n.cpu_capacity_units_per_s},
              {"mem_capacity_bytes", n.mem_capacity_bytes},
              {"is_rendezvous", n.is_rendezvous}};
}
void from_json(const ojson& j, NodeProfile& n) {
    n.node_id = j.at("node_id").get<NodeId>();
    n.position = j.at("position").get<Vec2>();
    n.coverage_radius_m = j.at("coverage_radius_m").get<double>();
    n.capability = capability_from_string(j.at("capability").get<std::string>());
    n.cpu_capacity_units_per_s = j.at("cpu_capacity_units_per_s").get<double>();
    n.mem_capacity_bytes = j.at("mem_capacity_bytes").get<std::int64_t>();
    n.is_rendezvous = j.at("is_rendezvous").get<bool>();
}

void to_json(ojson& j, const NodeMetrics& m) {
    j = ojson{{"node_id", m.node_id},
              {"sampled_at", m.sampled_at},
              {"cpu_load", m.cpu_load},
              {"mem_used", m.mem_used},
              {"bandwidth_avail_bps", m.bandwidth_avail_bps},
              {"rssi_dbm", m.rssi_dbm},
              {"snr_db", m.snr_db},
              {"mobility_speed_mps", m.mobility_speed_mps},
              {"traffic_type", to_string(m.traffic_type)}};
}
void from_json(const ojson& j, NodeMetrics& m) {
    m.node_id = j.at("node_id").get<NodeId>();
    m.sampled_at = j.at("sampled_at").get<SimTime>();
    m.cpu_load = j.at("cpu_load").get<double>();
    m.mem_used = j.at("mem_used").get<double>();
    m.bandwidth_avail_bps = j.at("bandwidth_avail_bps").get<std::int64_t>();
    m.rssi_dbm = j.at("rssi_dbm").get<double>();
    m.snr_db = j.at("snr_db").get<double>();
    m.mobility_speed_mps = j.at("mobility_speed_mps").get<double>();
    m.traffic_type = traffic_from_string(j.at("traffic_type").get<std::string>());
}

void to_json(ojson& j, const RankingWeights& w) {
    j = ojson{{"bandwidth", w.bandwidth},
              {"cpu_headroom", w.cpu_headroom},
              {"mem_headroom", w.mem_headroom},
              {"snr", w.snr},
              {"residence", w.residence},
              {"traffic_match", w.traffic_match}};
}
void from_json(const ojson& j, RankingWeights& w) {
    w.bandwidth = j.at("bandwidth").get<double>();
    w.cpu_headroom = j.at("cpu_headroom").get<double>();
    w.mem_headroom = j.at("mem_headroom").get<double>();
    w.snr = j.at("snr").get<double>();
    w.residence = j.at("residence").get<double>();
    w.traffic_match = j.at("traffic_match").get<double>();
}

void to_json(ojson& j, const BucketStatsSnapshot& b) {
    j = ojson{{"bucket", b.bucket},
              {"success", b.success},
              {"failure", b.failure},
              {"mean_completion_latency_ms", b.mean_completion_latency_ms}};
}
void from_json(const ojson& j, BucketStatsSnapshot& b) {
    b.bucket = j.at("bucket").get<std::string>();
    b.success = j.at("success").get<std::int64_t>();
    b.failure = j.at("failure").get<std::int64_t>();
    b.mean_completion_latency_ms = j.at("mean_completion_latency_ms").get<double>();
}

void to_json(ojson& j, const PolicySnapshot& p) {
    j = ojson{{"weights", p.weights}, {"stats", p.stats}};
}
void from_json(const ojson& j, PolicySnapshot& p) {
    p.weights = j.at("weights").get<RankingWeights>();
    p.stats = j.at("stats").get<std::vector<BucketStatsSnapshot>>();
}

void to_json(ojson& j, const HandoverPackage& p) {
    j = ojson{{"package_id", p.package_id},
              {"task_state", p.task_state},
              {"policy", p.policy},
              {"policy_overhead_bytes", p.policy_overhead_bytes},
              {"ttl", p.ttl},
              {"link_params", bytes_to_hex(p.link_params)},
              {"ranked_fallbacks", p.ranked_fallbacks},
              {"state_bytes", p.state_bytes},
              {"size_bytes", p.size_bytes}};
}
void from_json(const ojson& j, HandoverPackage& p) {
    p.package_id = j.at("package_id").get<std::string>();
    p.task_state = j.at("task_state").get<TaskState>();
    p.policy = j.at("policy").get<PolicySnapshot>();
    p.policy_overhead_bytes = j.at("policy_overhead_bytes").get<std::int64_t>();
    p.ttl = j.at("ttl").get<SemanticTTL>();
    p.link_params = hex_to_bytes(j.at("link_params").get<std::string>());
    p.ranked_fallbacks = j.at("ranked_fallbacks").get<std::vector<NodeId>>();
    p.state_bytes = j.at("state_bytes").get<std::int64_t>();
    p.size_bytes = j.at("size_bytes").get<std::int64_t>();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace waan::core
