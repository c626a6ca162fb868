#include "waan/cli/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "waan/core/error.hpp"

namespace waan::cli {

const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::WAAN: return "waan";
        case RunMode::Baseline: return "baseline";
    }
    return "unknown";
}

RunMode mode_from_string(const std::string& s) {
    if (s == "waan") return RunMode::WAAN;
    if (s == "baseline") return RunMode::Baseline;
    throw core::ParseError("unknown run mode '" + s + "'");
}

const char* to_string(FaultAction a) {
    switch (a) {
        case FaultAction::LinkDown: return "link_down";
        case FaultAction::LinkUp: return "link_up";
        case FaultAction::NodeDown: return "node_down";
    }
    return "unknown";
}

FaultAction fault_action_from_string(const std::string& s) {
    if (s == "link_down") return FaultAction::LinkDown;
    if (s == "link_up") return FaultAction::LinkUp;
    if (s == "node_down") return FaultAction::NodeDown;
    throw core::ParseError("unknown fault action '" + s + "'");
}

namespace {

using core::ojson;

// Strict-schema accessor: every key must be consumed, types must match, and
// diagnostics carry the JSON path of the offending field.
class Obj {
public:
    Obj(const ojson& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw core::ParseError(path_ + ": expected an object");
    }

    const ojson* find(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        used_.insert(key);
        return &*it;
    }

    const ojson& require(const std::string& key) {
        const ojson* p = find(key);
        if (!p) throw core::ParseError(path_ + ": missing required field '" + key + "'");
        return *p;
    }

    std::string req_str(const std::string& key) {
        const ojson& v = require(key);
        if (!v.is_string()) throw type_error(key, "a string");
        return v.get<std::string>();
    }

    std::int64_t req_int(const std::string& key) {
        const ojson& v = require(key);
        if (!v.is_number_integer()) throw type_error(key, "an integer");
        return v.get<std::int64_t>();
    }

    double req_num(const std::string& key) {
        const ojson& v = require(key);
        if (!v.is_number()) throw type_error(key, "a number");
        return v.get<double>();
    }

    std::string opt_str(const std::string& key, std::string dflt) {
        const ojson* p = find(key);
        if (!p) return dflt;
        if (!p->is_string()) throw type_error(key, "a string");
        return p->get<std::string>();
    }

    std::int64_t opt_int(const std::string& key, std::int64_t dflt) {
        const ojson* p = find(key);
        if (!p) return dflt;
        if (!p->is_number_integer()) throw type_error(key, "an integer");
        return p->get<std::int64_t>();
    }

    double opt_num(const std::string& key, double dflt) {
        const ojson* p = find(key);
        if (!p) return dflt;
        if (!p->is_number()) throw type_error(key, "a number");
        return p->get<double>();
    }

    bool opt_bool(const std::string& key, bool dflt) {
        const ojson* p = find(key);
        if (!p) return dflt;
        if (!p->is_boolean()) throw type_error(key, "a boolean");
        return p->get<bool>();
    }

    const std::string& path() const { return path_; }

    void finish() {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) {
                throw core::ParseError(path_ + ": unknown field '" + it.key() + "'");
            }
        }
    }

private:
    core::ParseError type_error(const std::string& key, const char* expected) {
        return core::ParseError(path_ + "." + key + ": expected " + expected);
    }

    const ojson& j_;
    std::string path_;
    std::set<std::string> used_;
};

const ojson& expect_array(const ojson& v, const std::string& path) {
    if (!v.is_array()) throw core::ParseError(path + ": expected an array");
    return v;
}

sim::WorldBounds parse_world(const ojson& j, const std::string& path) {
    Obj o(j, path);
    sim::WorldBounds w;
    w.min_x = o.req_num("min_x");
    w.min_y = o.req_num("min_y");
    w.max_x = o.req_num("max_x");
    w.max_y = o.req_num("max_y");
    o.finish();
    return w;
}

sim::RadioModel parse_radio(const ojson& j, const std::string& path) {
    Obj o(j, path);
    sim::RadioModel r;
    r.tx_power_dbm = o.opt_num("tx_power_dbm", r.tx_power_dbm);
    r.pathloss_exponent = o.opt_num("pathloss_exponent", r.pathloss_exponent);
    r.ref_distance_m = o.opt_num("ref_distance_m", r.ref_distance_m);
    r.ref_loss_db = o.opt_num("ref_loss_db", r.ref_loss_db);
    r.noise_floor_dbm = o.opt_num("noise_floor_dbm", r.noise_floor_dbm);
    r.connect_threshold_rssi_dbm =
        o.opt_num("connect_threshold_rssi_dbm", r.connect_threshold_rssi_dbm);
    r.base_link_latency_ms = o.opt_int("base_link_latency_ms", r.base_link_latency_ms);
    o.finish();
    return r;
}

NodeSpec parse_node(const ojson& j, const std::string& path) {
    Obj o(j, path);
    NodeSpec n;
    n.profile.node_id = o.req_str("node_id");
    n.profile.position = {o.req_num("x"), o.req_num("y")};
    n.profile.coverage_radius_m = o.req_num("coverage_radius_m");
    n.profile.capability = core::capability_from_string(o.req_str("capability"));
    n.profile.cpu_capacity_units_per_s = o.req_num("cpu_capacity_units_per_s");
    n.profile.mem_capacity_bytes = o.opt_int("mem_capacity_bytes", 1'073'741'824);
    n.profile.is_rendezvous = o.opt_bool("is_rendezvous", false);
    n.bandwidth_bps = o.req_int("bandwidth_bps");
    n.default_traffic = core::traffic_from_string(o.opt_str("traffic_type", "interactive"));
    o.finish();
    return n;
}

sim::MobilityPath parse_path(const ojson& j, const std::string& path,
                             const core::UserId& user_id) {
    Obj o(j, path);
    sim::MobilityPath p;
    p.user_id = user_id;
    const std::string mode = o.req_str("mode");
    if (mode == "scripted") {
        p.mode = sim::MobilityMode::Scripted;
        const ojson& arr = expect_array(o.require("waypoints"), path + ".waypoints");
        std::size_t i = 0;
        for (const auto& wj : arr) {
            Obj wo(wj, path + ".waypoints[" + std::to_string(i) + "]");
            sim::Waypoint w;
            w.position = {wo.req_num("x"), wo.req_num("y")};
            w.at_ms = wo.req_int("t_ms");
            wo.finish();
            p.waypoints.push_back(w);
            ++i;
        }
        if (!p.waypoints.empty()) p.start = p.waypoints.front().position;
    } else if (mode == "random_waypoint") {
        p.mode = sim::MobilityMode::RandomWaypoint;
        const ojson& sj = o.require("start");
        Obj so(sj, path + ".start");
        p.start = {so.req_num("x"), so.req_num("y")};
        so.finish();
        p.random_params.speed_min_mps = o.req_num("speed_min_mps");
        p.random_params.speed_max_mps = o.req_num("speed_max_mps");
    } else {
        throw core::ParseError(path + ".mode: unknown mobility mode '" + mode + "'");
    }
    o.finish();
    return p;
}

core::IntentTemplate parse_intent(const ojson& j, const std::string& path,
                                  const std::string& zone_id) {
    Obj o(j, path);
    core::IntentTemplate t;
    t.zone_id = zone_id;
    {
        Obj qo(o.require("qoe"), path + ".qoe");
        t.qoe.max_latency_ms = qo.req_int("max_latency_ms");
        t.qoe.min_accuracy = qo.opt_num("min_accuracy", 0.0);
        t.qoe.traffic_type = core::traffic_from_string(qo.opt_str("traffic_type", "interactive"));
        qo.finish();
    }
    t.time_budget_ms = o.req_int("time_budget_ms");
    t.relevance_threshold = o.opt_num("relevance_threshold", 0.6);
    const ojson& arr = expect_array(o.require("subtasks"), path + ".subtasks");
    std::size_t i = 0;
    for (const auto& sj : arr) {
        const std::string spath = path + ".subtasks[" + std::to_string(i) + "]";
        Obj so(sj, spath);
        core::SubTaskTemplate st;
        st.kind = core::subtask_kind_from_string(so.opt_str("kind", "generic"));
        st.work_units = so.req_int("work_units");
        st.input_size_bytes = so.req_int("input_size_bytes");
        st.state_base_bytes = so.opt_num("state_base_bytes", 0.0);
        st.state_slope_bytes = so.opt_num("state_slope_bytes", 0.0);
        if (const ojson* dep = so.find("depends_on")) {
            expect_array(*dep, spath + ".depends_on");
            for (const auto& d : *dep) {
                if (!d.is_number_integer() || d.get<std::int64_t>() < 0) {
                    throw core::ParseError(spath + ".depends_on: expected non-negative indices");
                }
                st.depends_on.push_back(static_cast<std::size_t>(d.get<std::int64_t>()));
            }
        }
        so.finish();
        t.subtasks.push_back(std::move(st));
        ++i;
    }
    o.finish();
    return t;
}

UserSpec parse_user(const ojson& j, const std::string& path) {
    Obj o(j, path);
    UserSpec u;
    u.user_id = o.req_str("user_id");
    u.zone_id = o.req_str("zone_id");
    u.submit_at_ms = o.req_int("submit_at_ms");
    u.path = parse_path(o.require("path"), path + ".path", u.user_id);
    u.intent = parse_intent(o.require("intent"), path + ".intent", u.zone_id);
    o.finish();
    return u;
}

core::RankingWeights parse_weights(const ojson& j, const std::string& path) {
    Obj o(j, path);
    core::RankingWeights w;
    w.bandwidth = o.opt_num("bandwidth", w.bandwidth);
    w.cpu_headroom = o.opt_num("cpu_headroom", w.cpu_headroom);
    w.mem_headroom = o.opt_num("mem_headroom", w.mem_headroom);
    w.snr = o.opt_num("snr", w.snr);
    w.residence = o.opt_num("residence", w.residence);
    w.traffic_match = o.opt_num("traffic_match", w.traffic_match);
    o.finish();
    return w;
}

swarm::NormalizationBounds parse_normalization(const ojson& j, const std::string& path) {
    Obj o(j, path);
    swarm::NormalizationBounds b;
    b.bandwidth_min_bps = o.opt_int("bandwidth_min_bps", b.bandwidth_min_bps);
    b.bandwidth_max_bps = o.opt_int("bandwidth_max_bps", b.bandwidth_max_bps);
    b.snr_min_db = o.opt_num("snr_min_db", b.snr_min_db);
    b.snr_max_db = o.opt_num("snr_max_db", b.snr_max_db);
    b.residence_min_ms = o.opt_int("residence_min_ms", b.residence_min_ms);
    b.residence_max_ms = o.opt_int("residence_max_ms", b.residence_max_ms);
    o.finish();
    return b;
}

Knobs parse_knobs(const ojson& j, const std::string& path) {
    Obj o(j, path);
    Knobs k;
    k.t_prepare_ms = o.opt_int("t_prepare_ms", k.t_prepare_ms);
    k.swarm_deadline_ms = o.opt_int("swarm_deadline_ms", k.swarm_deadline_ms);
    k.staleness_max_ms = o.opt_int("staleness_max_ms", k.staleness_max_ms);
    k.checkpoint_interval_units = o.opt_int("checkpoint_interval_units", k.checkpoint_interval_units);
    k.eta = o.opt_num("eta", k.eta);
    k.k_min = o.opt_int("k_min", k.k_min);
    k.mobility_tick_ms = o.opt_int("mobility_tick_ms", k.mobility_tick_ms);
    k.policy_overhead_bytes = o.opt_int("policy_overhead_bytes", k.policy_overhead_bytes);
    k.link_params_bytes = o.opt_int("link_params_bytes", k.link_params_bytes);
    k.reply_jitter_max_ms = o.opt_int("reply_jitter_max_ms", k.reply_jitter_max_ms);
    k.link_latency_bonus_pct = o.opt_num("link_latency_bonus_pct", k.link_latency_bonus_pct);
    k.retrigger_cooldown_ms = o.opt_int("retrigger_cooldown_ms", k.retrigger_cooldown_ms);
    if (const ojson* w = o.find("initial_weights")) {
        k.initial_weights = parse_weights(*w, path + ".initial_weights");
    }
    if (const ojson* n = o.find("normalization")) {
        k.normalization = parse_normalization(*n, path + ".normalization");
    }
    o.finish();
    return k;
}

FaultInjection parse_fault(const ojson& j, const std::string& path) {
    Obj o(j, path);
    FaultInjection f;
    f.at_ms = o.req_int("at_ms");
    f.node_id = o.req_str("node_id");
    f.action = fault_action_from_string(o.req_str("action"));
    o.finish();
    return f;
}

}  // namespace

Scenario parse_scenario(const ojson& j) {
    Obj o(j, "scenario");
    Scenario s;
    s.name = o.req_str("name");
    s.mode = mode_from_string(o.req_str("mode"));
    const std::int64_t seed = o.opt_int("seed", 1);
    if (seed < 0) throw core::ParseError("scenario.seed: must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
    s.end_time_ms = o.req_int("end_time_ms");
    s.world = parse_world(o.require("world"), "scenario.world");
    if (const ojson* r = o.find("radio")) {
        s.radio = parse_radio(*r, "scenario.radio");
    }
    {
        const ojson& arr = expect_array(o.require("nodes"), "scenario.nodes");
        std::size_t i = 0;
        for (const auto& nj : arr) {
            s.nodes.push_back(parse_node(nj, "scenario.nodes[" + std::to_string(i) + "]"));
            ++i;
        }
    }
    {
        const ojson& arr = expect_array(o.require("users"), "scenario.users");
        std::size_t i = 0;
        for (const auto& uj : arr) {
            s.users.push_back(parse_user(uj, "scenario.users[" + std::to_string(i) + "]"));
            ++i;
        }
    }
    if (const ojson* k = o.find("knobs")) {
        s.knobs = parse_knobs(*k, "scenario.knobs");
    }
    if (const ojson* f = o.find("faults")) {
        const ojson& arr = expect_array(*f, "scenario.faults");
        std::size_t i = 0;
        for (const auto& fj : arr) {
            s.faults.push_back(parse_fault(fj, "scenario.faults[" + std::to_string(i) + "]"));
            ++i;
        }
    }
    o.finish();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw core::ParseError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    ojson j;
    try {
        // ignore_comments=true: scenario files document their construction
        // with // comments.
        j = ojson::parse(buf.str(), nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw core::ParseError(path + ": " + e.what());
    }
    Scenario s = parse_scenario(j);
    auto result = validate_scenario(s);
    if (!result.ok()) throw core::ValidationFailure(result.violations);
    return s;
}

core::ValidationResult validate_scenario(const Scenario& s) {
    core::ValidationResult r;
    auto flag = [&r](std::string field, std::string rule) {
        r.violations.push_back({std::move(field), std::move(rule)});
    };

    if (s.name.empty()) flag("name", "must be non-empty");
    if (s.end_time_ms <= 0) flag("end_time_ms", "must be positive");
    if (s.world.max_x < s.world.min_x || s.world.max_y < s.world.min_y) {
        flag("world", "max bounds must be >= min bounds");
    }
    if (s.radio.ref_distance_m <= 0) flag("radio.ref_distance_m", "must be positive");
    if (s.radio.pathloss_exponent <= 0) flag("radio.pathloss_exponent", "must be positive");
    if (s.radio.base_link_latency_ms < 0) flag("radio.base_link_latency_ms", "must be >= 0");

    if (s.nodes.empty()) flag("nodes", "at least one node is required");
    std::set<core::NodeId> node_ids;
    bool any_serving = false;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const auto& n = s.nodes[i];
        const std::string field = "nodes[" + std::to_string(i) + "]";
        if (n.profile.node_id.empty()) flag(field + ".node_id", "must be non-empty");
        if (!node_ids.insert(n.profile.node_id).second) {
            flag(field + ".node_id", "duplicate node id '" + n.profile.node_id + "'");
        }
        if (n.profile.coverage_radius_m <= 0) flag(field + ".coverage_radius_m", "must be positive");
        if (n.profile.mem_capacity_bytes < 0) flag(field + ".mem_capacity_bytes", "must be >= 0");
        if (n.bandwidth_bps <= 0) flag(field + ".bandwidth_bps", "must be positive");
        if (n.profile.cpu_capacity_units_per_s <= 0) {
            flag(field + ".cpu_capacity_units_per_s", "must be positive");
        } else {
            const double q = 1000.0 / n.profile.cpu_capacity_units_per_s;
            const double rounded = std::round(q);
            if (rounded < 1.0 || std::abs(q - rounded) > 1e-9) {
                flag(field + ".cpu_capacity_units_per_s",
                     "1000 / capacity must be a whole number of milliseconds");
            }
        }
        if (!n.profile.is_rendezvous) any_serving = true;
    }
    if (!s.nodes.empty() && !any_serving) flag("nodes", "all nodes are rendezvous points");

    std::set<core::UserId> user_ids;
    for (std::size_t i = 0; i < s.users.size(); ++i) {
        const auto& u = s.users[i];
        const std::string field = "users[" + std::to_string(i) + "]";
        if (u.user_id.empty()) flag(field + ".user_id", "must be non-empty");
        if (!user_ids.insert(u.user_id).second) {
            flag(field + ".user_id", "duplicate user id '" + u.user_id + "'");
        }
        if (u.zone_id.empty()) flag(field + ".zone_id", "must be non-empty");
        if (u.submit_at_ms < 0) flag(field + ".submit_at_ms", "must be >= 0");
        if (u.submit_at_ms >= s.end_time_ms) {
            flag(field + ".submit_at_ms", "must be before end_time_ms");
        }
        if (u.path.mode == sim::MobilityMode::Scripted) {
            if (u.path.waypoints.empty()) {
                flag(field + ".path.waypoints", "scripted path needs at least one waypoint");
            } else {
                if (u.path.waypoints.front().at_ms != 0) {
                    flag(field + ".path.waypoints", "first waypoint must be at t_ms = 0");
                }
                for (std::size_t k = 1; k < u.path.waypoints.size(); ++k) {
                    if (u.path.waypoints[k].at_ms <= u.path.waypoints[k - 1].at_ms) {
                        flag(field + ".path.waypoints", "waypoint times must strictly increase");
                        break;
                    }
                }
            }
        } else {
            const auto& p = u.path.random_params;
            if (p.speed_min_mps <= 0 || p.speed_max_mps < p.speed_min_mps) {
                flag(field + ".path", "random waypoint speeds need 0 < min <= max");
            }
            if (s.world.max_x <= s.world.min_x || s.world.max_y <= s.world.min_y) {
                flag(field + ".path", "random waypoint mobility needs a non-degenerate world");
            }
        }
        if (u.intent.time_budget_ms <= 0) flag(field + ".intent.time_budget_ms", "must be positive");
        if (u.intent.relevance_threshold < 0.0 || u.intent.relevance_threshold > 1.0) {
            flag(field + ".intent.relevance_threshold", "must lie in [0, 1]");
        }
        if (u.intent.qoe.max_latency_ms <= 0) {
            flag(field + ".intent.qoe.max_latency_ms", "must be positive");
        }
        if (u.intent.subtasks.empty()) {
            flag(field + ".intent.subtasks", "at least one subtask is required");
        } else {
            try {
                const auto probe = core::decompose(u.intent, u.user_id, u.submit_at_ms, 0);
                for (const auto& v : core::validate_intent(probe).violations) {
                    flag(field + ".intent." + v.field, v.rule);
                }
            } catch (const core::Error& e) {
                flag(field + ".intent", e.what());
            }
        }
    }

    for (std::size_t i = 0; i < s.faults.size(); ++i) {
        const auto& f = s.faults[i];
        const std::string field = "faults[" + std::to_string(i) + "]";
        if (!node_ids.count(f.node_id)) {
            flag(field + ".node_id", "unknown node '" + f.node_id + "'");
        }
        if (f.at_ms < 0 || f.at_ms > s.end_time_ms) {
            flag(field + ".at_ms", "must lie within [0, end_time_ms]");
        }
    }

    const auto& k = s.knobs;
    if (k.t_prepare_ms < 0) flag("knobs.t_prepare_ms", "must be >= 0 (0 derives it)");
    if (k.swarm_deadline_ms <= 0) flag("knobs.swarm_deadline_ms", "must be positive");
    if (k.staleness_max_ms < 0) flag("knobs.staleness_max_ms", "must be >= 0");
    if (k.checkpoint_interval_units < 1) flag("knobs.checkpoint_interval_units", "must be >= 1");
    if (k.eta < 0) flag("knobs.eta", "must be >= 0");
    if (k.k_min < 1) flag("knobs.k_min", "must be >= 1");
    if (k.mobility_tick_ms < 1) flag("knobs.mobility_tick_ms", "must be >= 1");
    if (k.policy_overhead_bytes < 0) flag("knobs.policy_overhead_bytes", "must be >= 0");
    if (k.link_params_bytes < 0) flag("knobs.link_params_bytes", "must be >= 0");
    if (k.reply_jitter_max_ms < 0) flag("knobs.reply_jitter_max_ms", "must be >= 0");
    if (k.link_latency_bonus_pct < 0 || k.link_latency_bonus_pct > 100) {
        flag("knobs.link_latency_bonus_pct", "must lie in [0, 100]");
    }
    if (k.retrigger_cooldown_ms < 0) flag("knobs.retrigger_cooldown_ms", "must be >= 0");
    try {
        (void)core::canonical(k.initial_weights);
    } catch (const core::Error& e) {
        flag("knobs.initial_weights", e.what());
    }
    if (k.normalization.bandwidth_max_bps <= k.normalization.bandwidth_min_bps) {
        flag("knobs.normalization", "bandwidth bounds must satisfy max > min");
    }
    if (k.normalization.snr_max_db <= k.normalization.snr_min_db) {
        flag("knobs.normalization", "snr bounds must satisfy max > min");
    }
    if (k.normalization.residence_max_ms <= k.normalization.residence_min_ms) {
        flag("knobs.normalization", "residence bounds must satisfy max > min");
    }
    return r;
}

core::ojson to_json(const Scenario& s) {
    ojson j;
    j["name"] = s.name;
    j["mode"] = to_string(s.mode);
    j["seed"] = s.seed;
    j["end_time_ms"] = s.end_time_ms;
    j["world"] = {{"min_x", s.world.min_x},
                  {"min_y", s.world.min_y},
                  {"max_x", s.world.max_x},
                  {"max_y", s.world.max_y}};
    j["radio"] = {{"tx_power_dbm", s.radio.tx_power_dbm},
                  {"pathloss_exponent", s.radio.pathloss_exponent},
                  {"ref_distance_m", s.radio.ref_distance_m},
                  {"ref_loss_db", s.radio.ref_loss_db},
                  {"noise_floor_dbm", s.radio.noise_floor_dbm},
                  {"connect_threshold_rssi_dbm", s.radio.connect_threshold_rssi_dbm},
                  {"base_link_latency_ms", s.radio.base_link_latency_ms}};
    j["nodes"] = ojson::array();
    for (const auto& n : s.nodes) {
        j["nodes"].push_back({{"node_id", n.profile.node_id},
                              {"x", n.profile.position.x},
                              {"y", n.profile.position.y},
                              {"coverage_radius_m", n.profile.coverage_radius_m},
                              {"capability", core::to_string(n.profile.capability)},
                              {"cpu_capacity_units_per_s", n.profile.cpu_capacity_units_per_s},
                              {"mem_capacity_bytes", n.profile.mem_capacity_bytes},
                              {"is_rendezvous", n.profile.is_rendezvous},
                              {"bandwidth_bps", n.bandwidth_bps},
                              {"traffic_type", core::to_string(n.default_traffic)}});
    }
    j["users"] = ojson::array();
    for (const auto& u : s.users) {
        ojson uj;
        uj["user_id"] = u.user_id;
        uj["zone_id"] = u.zone_id;
        uj["submit_at_ms"] = u.submit_at_ms;
        ojson pj;
        if (u.path.mode == sim::MobilityMode::Scripted) {
            pj["mode"] = "scripted";
            pj["waypoints"] = ojson::array();
            for (const auto& w : u.path.waypoints) {
                pj["waypoints"].push_back(
                    {{"x", w.position.x}, {"y", w.position.y}, {"t_ms", w.at_ms}});
            }
        } else {
            pj["mode"] = "random_waypoint";
            pj["start"] = {{"x", u.path.start.x}, {"y", u.path.start.y}};
            pj["speed_min_mps"] = u.path.random_params.speed_min_mps;
            pj["speed_max_mps"] = u.path.random_params.speed_max_mps;
        }
        uj["path"] = std::move(pj);
        ojson ij;
        ij["qoe"] = {{"max_latency_ms", u.intent.qoe.max_latency_ms},
                     {"min_accuracy", u.intent.qoe.min_accuracy},
                     {"traffic_type", core::to_string(u.intent.qoe.traffic_type)}};
        ij["time_budget_ms"] = u.intent.time_budget_ms;
        ij["relevance_threshold"] = u.intent.relevance_threshold;
        ij["subtasks"] = ojson::array();
        for (const auto& st : u.intent.subtasks) {
            ojson sj;
            sj["kind"] = core::to_string(st.kind);
            sj["work_units"] = st.work_units;
            sj["input_size_bytes"] = st.input_size_bytes;
            sj["state_base_bytes"] = st.state_base_bytes;
            sj["state_slope_bytes"] = st.state_slope_bytes;
            sj["depends_on"] = st.depends_on;
            ij["subtasks"].push_back(std::move(sj));
        }
        uj["intent"] = std::move(ij);
        j["users"].push_back(std::move(uj));
    }
    const auto& k = s.knobs;
    j["knobs"] = {
        {"t_prepare_ms", k.t_prepare_ms},
        {"swarm_deadline_ms", k.swarm_deadline_ms},
        {"staleness_max_ms", k.staleness_max_ms},
        {"checkpoint_interval_units", k.checkpoint_interval_units},
        {"eta", k.eta},
        {"k_min", k.k_min},
        {"mobility_tick_ms", k.mobility_tick_ms},
        {"policy_overhead_bytes", k.policy_overhead_bytes},
        {"link_params_bytes", k.link_params_bytes},
        {"reply_jitter_max_ms", k.reply_jitter_max_ms},
        {"link_latency_bonus_pct", k.link_latency_bonus_pct},
        {"retrigger_cooldown_ms", k.retrigger_cooldown_ms},
        {"initial_weights",
         {{"bandwidth", k.initial_weights.bandwidth},
          {"cpu_headroom", k.initial_weights.cpu_headroom},
          {"mem_headroom", k.initial_weights.mem_headroom},
          {"snr", k.initial_weights.snr},
          {"residence", k.initial_weights.residence},
          {"traffic_match", k.initial_weights.traffic_match}}},
        {"normalization",
         {{"bandwidth_min_bps", k.normalization.bandwidth_min_bps},
          {"bandwidth_max_bps", k.normalization.bandwidth_max_bps},
          {"snr_min_db", k.normalization.snr_min_db},
          {"snr_max_db", k.normalization.snr_max_db},
          {"residence_min_ms", k.normalization.residence_min_ms},
          {"residence_max_ms", k.normalization.residence_max_ms}}}};
    j["faults"] = ojson::array();
    for (const auto& f : s.faults) {
        j["faults"].push_back(
            {{"at_ms", f.at_ms}, {"node_id", f.node_id}, {"action", to_string(f.action)}});
    }
    return j;
}

std::uint64_t scenario_hash(const Scenario& s) {
    return core::fnv1a64(to_json(s).dump());
}

}  // namespace waan::cli
