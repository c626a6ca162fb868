#include "waan/core/ops.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace waan::core {

const char* to_string(CapabilityClass c) {
    switch (c) {
        case CapabilityClass::Microcontroller: return "microcontroller";
        case CapabilityClass::Smartphone: return "smartphone";
        case CapabilityClass::EdgeNode: return "edge_node";
        case CapabilityClass::Cloud: return "cloud";
    }
    return "unknown";
}

const char* to_string(TrafficType t) {
    switch (t) {
        case TrafficType::Interactive: return "interactive";
        case TrafficType::Bulk: return "bulk";
        case TrafficType::Streaming: return "streaming";
    }
    return "unknown";
}

const char* to_string(SubTaskKind k) {
    switch (k) {
        case SubTaskKind::SensorFusion: return "sensor_fusion";
        case SubTaskKind::MultimodalSummarization: return "multimodal_summarization";
        case SubTaskKind::EnvironmentControl: return "environment_control";
        case SubTaskKind::Generic: return "generic";
    }
    return "unknown";
}

CapabilityClass capability_from_string(const std::string& s) {
    if (s == "microcontroller") return CapabilityClass::Microcontroller;
    if (s == "smartphone") return CapabilityClass::Smartphone;
    if (s == "edge_node") return CapabilityClass::EdgeNode;
    if (s == "cloud") return CapabilityClass::Cloud;
    throw ParseError("unknown capability class '" + s + "'");
}

TrafficType traffic_from_string(const std::string& s) {
    if (s == "interactive") return TrafficType::Interactive;
    if (s == "bulk") return TrafficType::Bulk;
    if (s == "streaming") return TrafficType::Streaming;
    throw ParseError("unknown traffic type '" + s + "'");
}

SubTaskKind subtask_kind_from_string(const std::string& s) {
    if (s == "sensor_fusion") return SubTaskKind::SensorFusion;
    if (s == "multimodal_summarization") return SubTaskKind::MultimodalSummarization;
    if (s == "environment_control") return SubTaskKind::EnvironmentControl;
    if (s == "generic") return SubTaskKind::Generic;
    throw ParseError("unknown subtask kind '" + s + "'");
}

int concurrent_slots(CapabilityClass c) {
    switch (c) {
        case CapabilityClass::Microcontroller: return 1;
        case CapabilityClass::Smartphone: return 2;
        case CapabilityClass::EdgeNode: return 4;
        case CapabilityClass::Cloud: return 16;
    }
    return 1;
}

RankingWeights canonical(const RankingWeights& w) {
    const double parts[] = {w.bandwidth, w.cpu_headroom, w.mem_headroom,
                            w.snr,       w.residence,    w.traffic_match};
    for (double p : parts) {
        if (p < 0.0) throw ValidationFailure({{"weights", "weights must be non-negative"}});
    }
    const double s = w.sum();
    if (s <= 0.0) throw ValidationFailure({{"weights", "at least one weight must be positive"}});
    return RankingWeights{w.bandwidth / s, w.cpu_headroom / s, w.mem_headroom / s,
                          w.snr / s,       w.residence / s,    w.traffic_match / s};
}

namespace {

// Cycle check over subtask dependencies; iterative three-color DFS.
bool has_dependency_cycle(const std::vector<SubTask>& subtasks) {
    std::map<SubTaskId, std::size_t> index;
    for (std::size_t i = 0; i < subtasks.size(); ++i) index[subtasks[i].subtask_id] = i;

    enum class Color { White, Gray, Black };
    std::vector<Color> color(subtasks.size(), Color::White);
    for (std::size_t root = 0; root < subtasks.size(); ++root) {
        if (color[root] != Color::White) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        color[root] = Color::Gray;
        while (!stack.empty()) {
            auto& [node, edge] = stack.back();
            const auto& deps = subtasks[node].depends_on;
            bool descended = false;
            while (edge < deps.size()) {
                auto it = index.find(deps[edge]);
                ++edge;
                if (it == index.end()) continue;  // unresolved ids reported separately
                const std::size_t next = it->second;
                if (color[next] == Color::Gray) return true;
                if (color[next] == Color::White) {
                    color[next] = Color::Gray;
                    stack.emplace_back(next, 0);
                    descended = true;
                    break;
                }
            }
            if (!descended && edge >= deps.size()) {
                color[node] = Color::Black;
                stack.pop_back();
            }
        }
    }
    return false;
}

}  // namespace

ValidationResult validate_intent(const Intent& intent) {
    ValidationResult r;
    auto flag = [&r](std::string field, std::string rule) {
        r.violations.push_back({std::move(field), std::move(rule)});
    };

    if (intent.intent_id.empty()) flag("intent_id", "must be non-empty");
    if (intent.user_id.empty()) flag("user_id", "must be non-empty");
    if (intent.submitted_at < 0) flag("submitted_at", "must be >= 0");
    if (intent.subtasks.empty()) flag("subtasks", "must contain at least one subtask");

    if (intent.qoe.max_latency_ms <= 0) flag("qoe.max_latency_ms", "must be > 0");
    if (intent.qoe.min_accuracy < 0.0 || intent.qoe.min_accuracy > 1.0)
        flag("qoe.min_accuracy", "must be in [0, 1]");
    if (intent.ttl.time_budget_ms <= 0) flag("ttl.time_budget_ms", "must be > 0");
    if (intent.ttl.relevance_threshold < 0.0 || intent.ttl.relevance_threshold > 1.0)
        flag("ttl.relevance_threshold", "must be in [0, 1]");
    if (intent.ttl.context.zone_id.empty()) flag("ttl.context.zone_id", "must be non-empty");

    std::set<SubTaskId> ids;
    for (std::size_t i = 0; i < intent.subtasks.size(); ++i) {
        const auto& st = intent.subtasks[i];
        const std::string field = "subtasks[" + std::to_string(i) + "]";
        if (st.subtask_id.empty()) flag(field + ".subtask_id", "must be non-empty");
        if (!ids.insert(st.subtask_id).second)
            flag(field + ".subtask_id", "duplicate id '" + st.subtask_id + "'");
        if (st.work_units < 1) flag(field + ".work_units", "must be >= 1");
        if (st.input_size_bytes < 0) flag(field + ".input_size_bytes", "must be >= 0");
        // Affine state size: checking both endpoints covers all of [0, 1].
        if (st.state_size(0.0) < 0 || st.state_size(1.0) < 0)
            flag(field + ".state_size", "must be non-negative on progress [0, 1]");
    }
    for (std::size_t i = 0; i < intent.subtasks.size(); ++i) {
        const auto& st = intent.subtasks[i];
        const std::string field = "subtasks[" + std::to_string(i) + "].depends_on";
        for (const auto& dep : st.depends_on) {
            if (dep == st.subtask_id) flag(field, "subtask must not depend on itself");
            else if (!ids.count(dep)) flag(field, "unknown subtask id '" + dep + "'");
        }
    }
    if (has_dependency_cycle(intent.subtasks))
        flag("subtasks", "dependency graph must be acyclic");
    return r;
}

Intent decompose(const IntentTemplate& tmpl, const UserId& user, SimTime now,
                 std::uint64_t intent_index) {
    if (tmpl.subtasks.empty())
        throw ValidationFailure({{"template.subtasks", "template names no subtasks"}});

    Intent intent;
    intent.intent_id = user + "-i" + std::to_string(intent_index);
    intent.user_id = user;
    intent.submitted_at = now;
    intent.qoe = tmpl.qoe;
    intent.ttl.created_at = now;
    intent.ttl.time_budget_ms = tmpl.time_budget_ms;
    intent.ttl.relevance_threshold = tmpl.relevance_threshold;
    intent.ttl.context = ContextTag{tmpl.zone_id, 1};

    for (std::size_t i = 0; i < tmpl.subtasks.size(); ++i) {
        const auto& t = tmpl.subtasks[i];
        SubTask st;
        st.subtask_id = intent.intent_id + "-s" + std::to_string(i);
        st.kind = t.kind;
        st.work_units = t.work_units;
        st.input_size_bytes = t.input_size_bytes;
        st.state_base_bytes = t.state_base_bytes;
        st.state_slope_bytes = t.state_slope_bytes;
        for (std::size_t dep : t.depends_on) {
            st.depends_on.push_back(intent.intent_id + "-s" + std::to_string(dep));
        }
        intent.subtasks.push_back(std::move(st));
    }
    return intent;
}

std::int64_t package_size(const HandoverPackage& pkg) {
    return pkg.state_bytes + pkg.policy_overhead_bytes +
           static_cast<std::int64_t>(pkg.link_params.size());
}

}  // namespace waan::core
