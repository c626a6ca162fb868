#include "waan/sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "waan/adapt/adapt.hpp"
#include "waan/core/error.hpp"
#include "waan/core/json.hpp"
#include "waan/core/ops.hpp"
#include "waan/handover/protocol.hpp"
#include "waan/sim/event.hpp"
#include "waan/sim/mobility.hpp"
#include "waan/sim/radio.hpp"
#include "waan/sim/rng.hpp"
#include "waan/swarm/swarm.hpp"

namespace waan::sim {
namespace {

using core::ojson;
using core::SimTime;

// Package-loss reasons carried in Event::aux_int.
constexpr std::int64_t kLossTargetDown = 1;
constexpr std::int64_t kLossCapacity = 2;
constexpr std::int64_t kLossStaleContext = 3;

const char* loss_reason(std::int64_t code) {
    switch (code) {
        case kLossTargetDown: return "target_down";
        case kLossCapacity: return "capacity";
        case kLossStaleContext: return "stale_context";
    }
    return "unknown";
}

class Simulation {
  public:
    explicit Simulation(const cli::Scenario& sc)
        : sc_(sc), root_(sc.seed), swarm_rng_(root_.substream("swarm")) {}

    RunResult run();

  private:
    // ---- per-entity runtime state ----

    struct NodeRt {
        cli::NodeSpec spec;
        bool alive = true;
        bool link_up = true;
        core::IntentId running;            // intent holding the executor; empty = idle
        std::vector<core::IntentId> fifo;  // admitted intents waiting for the executor
        core::RankingWeights weights;      // agent-local scorer weights
        adapt::OutcomeLog log;             // agent-local outcome statistics
        std::optional<rendezvous::Store> store;

        int load() const { return (running.empty() ? 0 : 1) + static_cast<int>(fifo.size()); }
        int slots() const { return core::concurrent_slots(spec.profile.capability); }
        bool online() const { return alive && link_up; }
        bool serving() const { return online() && !spec.profile.is_rendezvous; }
    };

    struct UserRt {
        cli::UserSpec spec;
        MobilityPath path;  // materialized
        core::ContextTag ctx;
        std::vector<core::NodeId> connected;  // sorted node ids currently in coverage
        core::IntentId intent_id;
    };

    struct OutcomeMeta {
        handover::HandoverOutcome outcome;
        std::string bucket;
        swarm::Components components;
    };

    // An in-progress handover chain: one swarm query, then a walk down the
    // ranking until a target resumes or the candidates run out.
    struct Pending {
        std::string query_id;
        core::NodeId source;
        SimTime started_at = 0;
        bool reactive = false;
        std::vector<swarm::MetricReplyPlan> plans;
        std::vector<core::NodeMetrics> replies;
        int attempts = 0;
        std::vector<core::NodeId> remaining;  // candidates not yet attempted
        core::NodeId in_flight;
        core::NodeId sender;
        core::HandoverPackage pkg;
        std::string bucket;
        swarm::Components primary_components;
        double prior = 0.5;
        double progress_at_transfer = 0.0;
    };

    struct IntentRt {
        core::Intent intent;  // current incarnation (TTL refreshes on resubmission)
        core::UserId user;
        std::size_t cur = 0;       // current subtask index
        std::int64_t exec_cur = 0; // completed units on the current subtask
        std::vector<std::int64_t> high_water;  // deepest unit ever reached per subtask
        std::int64_t lifetime_executed = 0;
        std::int64_t recomputed = 0;
        int resubmissions = 0;
        int stale_discards = 0;
        std::uint64_t epoch = 0;          // incarnation: guards arrival/ttl/result events
        std::uint64_t quantum_epoch = 0;  // cancels in-flight compute quanta
        std::optional<handover::AgentSession> session;
        std::optional<handover::AgentSession> closing;  // source between delivery and ack
        std::optional<OutcomeMeta> staged_outcome;      // filled at delivery, sealed at ack
        std::optional<Pending> pending;
        std::vector<OutcomeMeta> outcomes;
        core::RankingWeights session_weights;
        double latency_bonus_pct = 0.0;
        SimTime last_trigger_at = std::numeric_limits<SimTime>::min() / 4;
        std::int64_t units_since_checkpoint = 0;
        std::optional<core::TaskState> staged_resume;  // recovery state en route
        bool completed = false;
        bool failed = false;
        SimTime completed_at = -1;
        bool qoe_met = false;
        bool awaiting_submit = false;
        std::string awaiting_reason;
        bool result_pending = false;
        core::NodeId result_node;
        std::uint64_t next_query = 0;
        std::uint64_t next_package = 0;
        std::uint64_t handover_count = 0;  // completed walks (for ids)
    };

    // ---- members ----
    cli::Scenario sc_;
    Rng root_;
    Rng swarm_rng_;
    EventQueue q_;
    TraceWriter tr_;
    std::map<core::NodeId, NodeRt> nodes_;
    std::map<core::UserId, UserRt> users_;
    std::map<core::IntentId, IntentRt> intents_;
    std::map<std::uint64_t, rendezvous::CachedCheckpoint> staged_checkpoints_;
    std::uint64_t checkpoint_seq_ = 0;
    bool waan_ = true;

    // ---- small helpers ----

    NodeRt* node(const core::NodeId& id) {
        auto it = nodes_.find(id);
        return it == nodes_.end() ? nullptr : &it->second;
    }
    UserRt& user_of(const IntentRt& it) { return users_.at(it.user); }

    const core::SubTask& subtask(const IntentRt& it) const {
        return it.intent.subtasks.at(it.cur);
    }

    std::int64_t executed_total_lineage(const IntentRt& it) const {
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < it.cur; ++i) sum += it.intent.subtasks[i].work_units;
        return sum + it.exec_cur;
    }

    SimTime result_latency(const IntentRt& it) const {
        const double base = static_cast<double>(sc_.radio.base_link_latency_ms);
        return std::llround(base * (1.0 - it.latency_bonus_pct / 100.0));
    }

    std::vector<core::NodeId> compute_connected(const UserRt& u, SimTime t) {
        std::vector<core::NodeId> out;
        const auto pos = position_at(u.path, t);
        for (const auto& [id, n] : nodes_) {
            if (n.online() && connected(sc_.radio, pos, n.spec.profile)) out.push_back(id);
        }
        return out;  // map order = sorted
    }

    bool user_sees(const UserRt& u, const core::NodeId& id) const {
        return std::binary_search(u.connected.begin(), u.connected.end(), id);
    }

    // Best serving node for a fresh (re)submission: highest RSSI among
    // connected serving nodes with a free admission slot; ties by node id.
    NodeRt* best_serving_node(const UserRt& u, SimTime t) {
        NodeRt* best = nullptr;
        double best_rssi = 0.0;
        const auto pos = position_at(u.path, t);
        for (const auto& id : u.connected) {
            NodeRt* n = node(id);
            if (!n || !n->serving() || n->load() >= n->slots()) continue;
            const double r = rssi_dbm(sc_.radio, core::distance(pos, n->spec.profile.position));
            if (!best || r > best_rssi) {
                best = n;
                best_rssi = r;
            }
        }
        return best;
    }

    // Nearest online rendezvous reachable over a node-to-node link; ties by id.
    NodeRt* nearest_rendezvous(const NodeRt& from) {
        NodeRt* best = nullptr;
        double best_d = 0.0;
        for (auto& [id, n] : nodes_) {
            if (!n.spec.profile.is_rendezvous || !n.online() || !n.store) continue;
            if (!node_link(sc_.radio, from.spec.profile, n.spec.profile)) continue;
            const double d = core::distance(from.spec.profile.position, n.spec.profile.position);
            if (!best || d < best_d) {
                best = &n;
                best_d = d;
            }
        }
        return best;
    }

    SimTime link_transfer_ms(const NodeRt& a, const NodeRt& b, std::int64_t bytes) const {
        return transfer_time_ms(sc_.radio, bytes, a.spec.bandwidth_bps, b.spec.bandwidth_bps);
    }

    // ---- trace helpers ----

    ojson& trace(SimTime t, const char* kind) { return tr_.emit(t, kind); }

    static ojson weights_json(const core::RankingWeights& w) {
        return ojson{{"bandwidth", w.bandwidth},     {"cpu_headroom", w.cpu_headroom},
                     {"mem_headroom", w.mem_headroom}, {"snr", w.snr},
                     {"residence", w.residence},     {"traffic_match", w.traffic_match}};
    }

    static ojson components_json(const swarm::Components& c) {
        return ojson{{"bandwidth", c.bandwidth},     {"cpu_headroom", c.cpu_headroom},
                     {"mem_headroom", c.mem_headroom}, {"snr", c.snr},
                     {"residence", c.residence},     {"traffic_match", c.traffic_match}};
    }

    void trace_phase(SimTime t, const IntentRt& it, const handover::AgentSession& s,
                     const char* reason) {
        auto& r = trace(t, "session_phase");
        r["intent"] = it.intent.intent_id;
        r["node"] = s.host_node;
        r["phase"] = handover::to_string(s.phase);
        r["reason"] = reason;
    }

    void report_to_rendezvous(const NodeRt& from, SimTime t, rendezvous::AuditAction action,
                              const core::IntentId& intent, std::string detail) {
        NodeRt* rv = nearest_rendezvous(from);
        if (!rv) return;
        rv->store->report(t, action, intent, from.spec.profile.node_id, std::move(detail));
    }

    // ---- executor ----

    void maybe_start(NodeRt& n, SimTime now) {
        if (!n.alive || !n.running.empty()) return;
        while (!n.fifo.empty()) {
            const core::IntentId id = n.fifo.front();
            n.fifo.erase(n.fifo.begin());
            auto itf = intents_.find(id);
            if (itf == intents_.end()) continue;
            IntentRt& it = itf->second;
            if (!it.session || it.session->host_node != n.spec.profile.node_id ||
                it.session->phase != handover::SessionPhase::Executing) {
                continue;
            }
            n.running = id;
            Event ev;
            ev.kind = EventKind::ComputeQuantumDone;
            ev.intent_id = id;
            ev.node_id = n.spec.profile.node_id;
            ev.epoch = it.quantum_epoch;
            q_.schedule(ev, now + n.spec.profile.quantum_ms());
            return;
        }
    }

    void release_executor(NodeRt& n, const core::IntentId& id, SimTime now) {
        if (n.running == id) {
            n.running.clear();
            maybe_start(n, now);
        } else {
            auto pos = std::find(n.fifo.begin(), n.fifo.end(), id);
            if (pos != n.fifo.end()) n.fifo.erase(pos);
        }
    }

    void enqueue_execution(NodeRt& n, IntentRt& it, SimTime now) {
        n.fifo.push_back(it.intent.intent_id);
        maybe_start(n, now);
    }

    // ---- session lifecycle ----

    void fail_session(IntentRt& it, SimTime now, const char* reason) {
        it.quantum_epoch += 1;
        if (it.session && !handover::is_terminal(it.session->phase)) {
            handover::transition(*it.session, handover::SessionPhase::Failed, now);
            trace_phase(now, it, *it.session, reason);
            if (NodeRt* n = node(it.session->host_node)) {
                release_executor(*n, it.intent.intent_id, now);
            }
        }
    }

    void fail_closing(IntentRt& it, SimTime now, const char* reason) {
        if (it.closing && !handover::is_terminal(it.closing->phase)) {
            handover::transition(*it.closing, handover::SessionPhase::Failed, now);
            trace_phase(now, it, *it.closing, reason);
        }
    }

    // ---- submission and resubmission ----

    void submit_intent(IntentRt& it, SimTime now, const std::string& reason) {
        UserRt& u = user_of(it);
        NodeRt* n = best_serving_node(u, now);
        if (!n) {
            it.awaiting_submit = true;
            it.awaiting_reason = reason;
            return;
        }
        it.awaiting_submit = false;
        it.cur = 0;
        it.exec_cur = 0;
        it.units_since_checkpoint = 0;
        it.latency_bonus_pct = 0.0;
        it.staged_resume.reset();
        it.result_pending = false;
        // A (re)submission is a fresh request: the TTL clock restarts and the
        // context tag is the user's current one.
        it.intent.ttl.created_at = now;
        it.intent.ttl.context = u.ctx;
        it.session_weights = n->weights;
        it.epoch += 1;
        it.quantum_epoch += 1;

        const std::int64_t bytes = it.intent.total_input_bytes();
        const SimTime arrival =
            now + transfer_time_ms(sc_.radio, bytes, n->spec.bandwidth_bps, n->spec.bandwidth_bps);
        auto& r = trace(now, "intent_submitted");
        r["intent"] = it.intent.intent_id;
        r["user"] = u.spec.user_id;
        r["node"] = n->spec.profile.node_id;
        r["input_bytes"] = bytes;
        r["arrival_ms"] = arrival;
        r["reason"] = reason;
        r["resubmissions"] = it.resubmissions;

        Event ev;
        ev.kind = EventKind::ExecutionReady;
        ev.intent_id = it.intent.intent_id;
        ev.node_id = n->spec.profile.node_id;
        ev.epoch = it.epoch;
        q_.schedule(ev, arrival);

        Event ttl;
        ttl.kind = EventKind::TTLExpired;
        ttl.intent_id = it.intent.intent_id;
        ttl.epoch = it.epoch;
        q_.schedule(ttl, std::max(now, it.intent.ttl.expires_at()));
    }

    void resubmit_or_wait(IntentRt& it, SimTime now, const std::string& reason) {
        if (it.completed || it.failed) return;
        it.resubmissions += 1;
        auto& r = trace(now, "resubmission");
        r["intent"] = it.intent.intent_id;
        r["reason"] = reason;
        r["count"] = it.resubmissions;
        submit_intent(it, now, reason);
    }

    // WAAN loss recovery: the new serving node asks its nearest rendezvous
    // for the latest checkpoint; a hit resumes from it, a miss resubmits.
    void recovery_or_resubmit(IntentRt& it, SimTime now, const std::string& reason) {
        if (it.completed || it.failed) return;
        UserRt& u = user_of(it);
        NodeRt* serving = best_serving_node(u, now);
        if (!serving) {
            it.awaiting_submit = true;
            it.awaiting_reason = "recovery";
            return;
        }
        NodeRt* rv = nearest_rendezvous(*serving);
        if (!rv) {
            resubmit_or_wait(it, now, reason + "_no_rendezvous");
            return;
        }
        auto cp = rv->store->recover(it.intent.intent_id, u.ctx, now);
        if (!cp) {
            auto& r = trace(now, "recovery_miss");
            r["intent"] = it.intent.intent_id;
            r["node"] = serving->spec.profile.node_id;
            r["rendezvous"] = rv->spec.profile.node_id;
            resubmit_or_wait(it, now, "recovery_miss");
            return;
        }
        // Locate the checkpointed subtask in the intent.
        std::size_t idx = it.intent.subtasks.size();
        for (std::size_t i = 0; i < it.intent.subtasks.size(); ++i) {
            if (it.intent.subtasks[i].subtask_id == cp->state.subtask_id) {
                idx = i;
                break;
            }
        }
        if (idx == it.intent.subtasks.size()) {
            resubmit_or_wait(it, now, "recovery_mismatch");
            return;
        }
        it.cur = idx;
        it.exec_cur = cp->state.executed_units;
        it.units_since_checkpoint = 0;
        it.latency_bonus_pct = 0.0;
        it.staged_resume = cp->state;
        it.staged_resume->host_agent = serving->spec.profile.node_id;
        it.epoch += 1;
        it.quantum_epoch += 1;
        const SimTime arrival = now + sc_.radio.base_link_latency_ms +
                                link_transfer_ms(*rv, *serving, cp->bytes);
        auto& r = trace(now, "recovery_resume");
        r["intent"] = it.intent.intent_id;
        r["node"] = serving->spec.profile.node_id;
        r["rendezvous"] = rv->spec.profile.node_id;
        r["subtask"] = cp->state.subtask_id;
        r["executed_units"] = cp->state.executed_units;
        r["arrival_ms"] = arrival;
        Event ev;
        ev.kind = EventKind::ExecutionReady;
        ev.intent_id = it.intent.intent_id;
        ev.node_id = serving->spec.profile.node_id;
        ev.epoch = it.epoch;
        q_.schedule(ev, arrival);
    }

    // ---- checkpoints ----

    void push_checkpoint(IntentRt& it, NodeRt& n, SimTime now) {
        if (!waan_ || !it.session) return;
        NodeRt* rv = nearest_rendezvous(n);
        if (!rv) {
            auto& r = trace(now, "checkpoint_skipped");
            r["intent"] = it.intent.intent_id;
            r["node"] = n.spec.profile.node_id;
            r["reason"] = "no_rendezvous";
            return;
        }
        rendezvous::CachedCheckpoint cp;
        cp.intent_id = it.intent.intent_id;
        cp.state = it.session->current_state;
        cp.ttl = it.intent.ttl;
        cp.bytes = subtask(it).state_size(it.session->current_state.progress);
        const SimTime arrival = now + link_transfer_ms(n, *rv, cp.bytes);
        const std::uint64_t key = checkpoint_seq_++;
        staged_checkpoints_[key] = cp;
        auto& r = trace(now, "checkpoint_pushed");
        r["intent"] = it.intent.intent_id;
        r["node"] = n.spec.profile.node_id;
        r["rendezvous"] = rv->spec.profile.node_id;
        r["bytes"] = cp.bytes;
        r["executed_units"] = cp.state.executed_units;
        r["arrival_ms"] = arrival;
        Event ev;
        ev.kind = EventKind::CheckpointDue;
        ev.intent_id = it.intent.intent_id;
        ev.node_id = rv->spec.profile.node_id;
        ev.aux_int = static_cast<std::int64_t>(key);
        q_.schedule(ev, arrival);
    }

    void on_checkpoint_due(const Event& ev) {
        auto staged = staged_checkpoints_.find(static_cast<std::uint64_t>(ev.aux_int));
        if (staged == staged_checkpoints_.end()) return;
        rendezvous::CachedCheckpoint cp = staged->second;
        staged_checkpoints_.erase(staged);
        NodeRt* rv = node(ev.node_id);
        if (!rv || !rv->alive || !rv->store) {
            auto& r = trace(ev.fire_at, "checkpoint_dropped");
            r["intent"] = cp.intent_id;
            r["rendezvous"] = ev.node_id;
            return;
        }
        cp.cached_at = ev.fire_at;
        rv->store->cache(cp, ev.fire_at);
        auto& r = trace(ev.fire_at, "checkpoint_cached");
        r["intent"] = cp.intent_id;
        r["rendezvous"] = ev.node_id;
        r["executed_units"] = cp.state.executed_units;
    }

    // ---- handover: trigger, swarm, decision, transfer ----

    void begin_trigger(IntentRt& it, NodeRt& n, SimTime now, bool reactive) {
        it.quantum_epoch += 1;  // cancel any in-flight quantum
        handover::transition(*it.session, handover::SessionPhase::HandoverPreparing, now);
        trace_phase(now, it, *it.session, reactive ? "link_lost" : "exit_predicted");
        release_executor(n, it.intent.intent_id, now);
        it.last_trigger_at = now;
        Event ev;
        ev.kind = EventKind::HandoverTriggered;
        ev.intent_id = it.intent.intent_id;
        ev.node_id = n.spec.profile.node_id;
        ev.aux_int = reactive ? 1 : 0;
        q_.schedule(ev, now);
    }

    void on_handover_triggered(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (!it.session || it.session->host_node != ev.node_id ||
            it.session->phase != handover::SessionPhase::HandoverPreparing || it.pending) {
            return;
        }
        NodeRt* n = node(ev.node_id);
        if (!n || !n->online()) return;
        UserRt& u = user_of(it);
        const SimTime now = ev.fire_at;

        // Freeze a checkpoint of the exact state the package will carry.
        push_checkpoint(it, *n, now);
        it.units_since_checkpoint = 0;

        // Swarm query: serving peers within radio reach, never the origin or
        // rendezvous points.
        std::vector<core::NodeProfile> online_profiles;
        for (const auto& [id, peer] : nodes_) {
            if (peer.online()) online_profiles.push_back(peer.spec.profile);
        }
        std::vector<core::NodeId> candidates;
        for (const auto& id : swarm::discover_neighbors(online_profiles, ev.node_id, sc_.radio)) {
            const NodeRt* peer = node(id);
            if (peer && peer->serving()) candidates.push_back(id);
        }

        Pending p;
        p.query_id = it.intent.intent_id + "-q" + std::to_string(it.next_query++);
        p.source = ev.node_id;
        p.started_at = now;
        p.reactive = ev.aux_int == 1;

        swarm::SwarmQuery query;
        query.query_id = p.query_id;
        query.origin = ev.node_id;
        query.candidate_set = candidates;
        query.issued_at = now;
        query.deadline_ms = sc_.knobs.swarm_deadline_ms;

        swarm::CollectEnv env;
        env.reachable = [this, n](const core::NodeId& id) {
            const NodeRt* peer = node(id);
            return peer && peer->online() &&
                   node_link(sc_.radio, n->spec.profile, peer->spec.profile);
        };
        env.sample = [this, &u](const core::NodeId& id, SimTime t) {
            return sample_metrics(id, u, t);
        };
        env.base_link_latency_ms = sc_.radio.base_link_latency_ms;
        env.reply_jitter_max_ms = sc_.knobs.reply_jitter_max_ms;
        p.plans = swarm::collect_metrics(query, env, swarm_rng_);

        auto& r = trace(now, "swarm_query");
        r["query"] = p.query_id;
        r["intent"] = it.intent.intent_id;
        r["origin"] = ev.node_id;
        r["candidates"] = candidates;
        r["deadline_ms"] = sc_.knobs.swarm_deadline_ms;
        r["reactive"] = p.reactive;

        for (const auto& plan : p.plans) {
            Event mq;
            mq.kind = EventKind::MetricQuery;
            mq.intent_id = it.intent.intent_id;
            mq.query_id = p.query_id;
            mq.peer_id = plan.metrics.node_id;
            q_.schedule(mq, plan.query_arrives_at);
            Event mr;
            mr.kind = EventKind::MetricReply;
            mr.intent_id = it.intent.intent_id;
            mr.query_id = p.query_id;
            mr.peer_id = plan.metrics.node_id;
            q_.schedule(mr, plan.reply_arrives_at);
        }
        Event due;
        due.kind = EventKind::SwarmRankDue;
        due.intent_id = it.intent.intent_id;
        due.node_id = ev.node_id;
        due.query_id = p.query_id;
        q_.schedule(due, now + sc_.knobs.swarm_deadline_ms);

        it.pending = std::move(p);
    }

    core::NodeMetrics sample_metrics(const core::NodeId& id, const UserRt& u, SimTime t) {
        const NodeRt& n = nodes_.at(id);
        const auto pos = position_at(u.path, t);
        const double d = core::distance(pos, n.spec.profile.position);
        core::NodeMetrics m;
        m.node_id = id;
        m.sampled_at = t;
        m.cpu_load = static_cast<double>(n.load()) / static_cast<double>(n.slots());
        m.mem_used = 0.0;  // memory pressure is not simulated
        m.bandwidth_avail_bps = n.spec.bandwidth_bps;
        m.rssi_dbm = rssi_dbm(sc_.radio, d);
        m.snr_db = snr_db(sc_.radio, d);
        m.mobility_speed_mps = speed_at(u.path, t);
        m.traffic_type = n.spec.default_traffic;
        return m;
    }

    void on_metric_query(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end() || !itf->second.pending ||
            itf->second.pending->query_id != ev.query_id) {
            return;
        }
        auto& r = trace(ev.fire_at, "metric_query");
        r["query"] = ev.query_id;
        r["candidate"] = ev.peer_id;
    }

    void on_metric_reply(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (!it.pending || it.pending->query_id != ev.query_id) return;
        for (const auto& plan : it.pending->plans) {
            if (plan.metrics.node_id == ev.peer_id) {
                it.pending->replies.push_back(plan.metrics);
                auto& r = trace(ev.fire_at, "metric_reply");
                r["query"] = ev.query_id;
                r["candidate"] = ev.peer_id;
                r["rssi_dbm"] = plan.metrics.rssi_dbm;
                r["cpu_load"] = plan.metrics.cpu_load;
                break;
            }
        }
    }

    void on_swarm_rank_due(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (!it.pending || it.pending->query_id != ev.query_id || !it.session ||
            it.session->phase != handover::SessionPhase::HandoverPreparing) {
            return;
        }
        const SimTime now = ev.fire_at;
        UserRt& u = user_of(it);
        NodeRt* src = node(it.pending->source);

        // Discard metrics that aged past the staleness bound, then normalize.
        std::vector<std::pair<core::NodeMetrics, swarm::Components>> scored;
        for (const auto& m : it.pending->replies) {
            if (now - m.sampled_at > sc_.knobs.staleness_max_ms) {
                auto& r = trace(now, "metrics_discarded");
                r["query"] = ev.query_id;
                r["candidate"] = m.node_id;
                r["staleness_ms"] = now - m.sampled_at;
                continue;
            }
            const NodeRt* cand = node(m.node_id);
            if (!cand) continue;
            swarm::UserView view;
            view.path = &u.path;
            view.now = now;
            view.horizon_ms = now + sc_.knobs.normalization.residence_max_ms;
            view.intent_traffic = it.intent.qoe.traffic_type;
            scored.emplace_back(
                m, swarm::normalize_metrics(m, cand->spec.profile, view, sc_.knobs.normalization));
        }
        const auto ranking = swarm::rank_candidates(scored, it.session_weights, now);

        auto& r = trace(now, "ranking");
        r["query"] = ev.query_id;
        r["intent"] = it.intent.intent_id;
        r["origin"] = it.pending->source;
        auto results = ojson::array();
        for (const auto& cs : ranking) {
            results.push_back(ojson{{"node", cs.node_id},
                                    {"score", cs.score},
                                    {"staleness_ms", cs.metrics_staleness_ms},
                                    {"components", components_json(cs.components)}});
        }
        r["results"] = std::move(results);

        if (ranking.empty()) {
            auto& nr = trace(now, "no_candidate");
            nr["intent"] = it.intent.intent_id;
            nr["query"] = ev.query_id;
            it.pending.reset();
            it.last_trigger_at = now;
            if (src && src->alive) {
                handover::transition(*it.session, handover::SessionPhase::Executing, now);
                trace_phase(now, it, *it.session, "no_candidate");
                enqueue_execution(*src, it, now);
            } else {
                fail_session(it, now, "no_candidate_source_down");
                if (waan_) recovery_or_resubmit(it, now, "no_candidate");
                else resubmit_or_wait(it, now, "no_candidate");
            }
            return;
        }

        // Decision: primary target, context bucket, transfer kind.
        const auto& primary = ranking.front();
        const NodeRt& target = nodes_.at(primary.node_id);
        adapt::BucketKey key;
        key.traffic = it.intent.qoe.traffic_type;
        key.band = adapt::speed_band(speed_at(u.path, now));
        key.target = target.spec.profile.capability;
        const std::string bucket = adapt::to_string(key);
        const double prior = src ? adapt::few_shot_prior(src->log, bucket, sc_.knobs.k_min) : 0.5;

        // Assemble the package at the frozen quantum boundary.
        handover::PackageInputs in;
        in.package_id = it.intent.intent_id + "-p" + std::to_string(it.next_package++);
        in.policy = adapt::policy_snapshot(src ? src->log : adapt::OutcomeLog{}, it.session_weights);
        in.policy_overhead_bytes = sc_.knobs.policy_overhead_bytes;
        in.ttl = it.intent.ttl;
        in.link_params.resize(static_cast<std::size_t>(sc_.knobs.link_params_bytes));
        for (std::size_t i = 0; i < in.link_params.size(); ++i) {
            in.link_params[i] = static_cast<std::uint8_t>(i & 0xff);
        }
        for (const auto& cs : ranking) in.ranking.push_back(cs.node_id);
        core::HandoverPackage pkg = handover::build_package(*it.session, subtask(it), in);

        adapt::TransferCostContext ctx;
        ctx.radio = sc_.radio;
        ctx.bandwidth_bps = std::min(src ? src->spec.bandwidth_bps : target.spec.bandwidth_bps,
                                     target.spec.bandwidth_bps);
        ctx.quantum_ms = target.spec.profile.quantum_ms();
        ctx.executed_units = executed_total_lineage(it);
        ctx.success_prior = prior;
        const auto decision =
            adapt::decide_transfer_kind(pkg.size_bytes, it.intent.total_input_bytes(), ctx);

        auto& dr = trace(now, "handover_decision");
        dr["intent"] = it.intent.intent_id;
        dr["bucket"] = bucket;
        dr["prior"] = decision.prior;
        dr["state_cost_ms"] = decision.state_cost_ms;
        dr["full_cost_ms"] = decision.full_cost_ms;
        dr["transfer"] = adapt::to_string(decision.kind);
        dr["target"] = primary.node_id;
        if (src) {
            report_to_rendezvous(*src, now, rendezvous::AuditAction::HandoverDecision,
                                 it.intent.intent_id,
                                 std::string(adapt::to_string(decision.kind)) + " -> " +
                                     primary.node_id);
        }

        if (decision.kind == adapt::TransferKind::FullOffload) {
            // Cheaper to restart elsewhere than to ship state: abandon the
            // session and resubmit the intent from scratch.
            it.pending.reset();
            fail_session(it, now, "full_offload");
            resubmit_or_wait(it, now, "full_offload");
            return;
        }

        it.pending->pkg = std::move(pkg);
        it.pending->bucket = bucket;
        it.pending->primary_components = primary.components;
        it.pending->prior = prior;
        it.pending->progress_at_transfer = it.session->current_state.progress;
        for (const auto& cs : ranking) it.pending->remaining.push_back(cs.node_id);
        handover::transition(*it.session, handover::SessionPhase::Transferring, now);
        trace_phase(now, it, *it.session, "state_transfer");
        send_package(it, now);
    }

    void send_package(IntentRt& it, SimTime now) {
        Pending& p = *it.pending;
        const core::NodeId target_id = p.remaining.front();
        p.remaining.erase(p.remaining.begin());
        p.in_flight = target_id;
        p.attempts += 1;

        // Sender: the source while it is reachable, otherwise a rendezvous
        // that holds the trigger checkpoint (same frozen state).
        NodeRt* src = node(p.source);
        NodeRt* sender = (src && src->online()) ? src : nullptr;
        if (!sender) {
            NodeRt* target = node(target_id);
            if (target) {
                NodeRt* rv = nearest_rendezvous(*target);
                if (rv && rv->store && rv->store->contains(it.intent.intent_id)) sender = rv;
            }
        }
        if (!sender) {
            abort_handover(it, now, "no_sender");
            return;
        }
        p.sender = sender->spec.profile.node_id;
        const NodeRt& target = nodes_.at(target_id);
        const SimTime tt = link_transfer_ms(*sender, target, p.pkg.size_bytes);
        Event ev;
        ev.kind = EventKind::PackageSent;
        ev.intent_id = it.intent.intent_id;
        ev.node_id = p.sender;
        ev.peer_id = target_id;
        ev.package_id = p.pkg.package_id;
        ev.attempt = p.attempts;
        ev.aux_time = tt;
        q_.schedule(ev, now);
    }

    bool pending_attempt_matches(const IntentRt& it, const Event& ev) const {
        return it.pending && it.pending->pkg.package_id == ev.package_id &&
               it.pending->attempts == ev.attempt && it.pending->in_flight == ev.peer_id;
    }

    void on_package_sent(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end() || !pending_attempt_matches(itf->second, ev)) return;
        IntentRt& it = itf->second;
        auto& r = trace(ev.fire_at, "package_sent");
        r["intent"] = ev.intent_id;
        r["package"] = ev.package_id;
        r["from"] = ev.node_id;
        r["to"] = ev.peer_id;
        r["bytes"] = it.pending->pkg.size_bytes;
        r["attempt"] = ev.attempt;
        r["delivery_ms"] = ev.fire_at + ev.aux_time;
        Event dv = ev;
        dv.kind = EventKind::PackageDelivered;
        q_.schedule(dv, ev.fire_at + ev.aux_time);
    }

    void on_package_delivered(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end() || !pending_attempt_matches(itf->second, ev)) return;
        IntentRt& it = itf->second;
        const SimTime now = ev.fire_at;
        NodeRt* target = node(ev.peer_id);

        auto schedule_loss = [&](std::int64_t reason, SimTime at) {
            Event lost = ev;
            lost.kind = EventKind::PackageLost;
            lost.aux_int = reason;
            q_.schedule(lost, at);
        };

        if (!target || !target->online()) {
            schedule_loss(kLossTargetDown, now);
            return;
        }
        if (target->load() >= target->slots()) {
            schedule_loss(kLossCapacity, now);
            return;
        }

        auto& r = trace(now, "package_delivered");
        r["intent"] = ev.intent_id;
        r["package"] = ev.package_id;
        r["to"] = ev.peer_id;
        r["attempt"] = ev.attempt;

        UserRt& u = user_of(it);
        const auto verdict = handover::check_ttl(it.pending->pkg.ttl, u.ctx, now);
        auto& tv = trace(now, "ttl_verdict");
        tv["intent"] = ev.intent_id;
        tv["stage"] = "package_delivery";
        tv["time_ok"] = verdict.time_ok;
        tv["relevance"] = verdict.relevance;
        tv["valid"] = verdict.valid;
        report_to_rendezvous(*target, now, rendezvous::AuditAction::TTLVerdict,
                             it.intent.intent_id,
                             std::string(verdict.valid ? "valid" : "stale") + " at delivery");
        if (!verdict.valid) {
            it.stale_discards += 1;
            auto& sd = trace(now, "stale_discard");
            sd["intent"] = ev.intent_id;
            sd["package"] = ev.package_id;
            sd["node"] = ev.peer_id;
            sd["attempt"] = ev.attempt;
            // The target NACKs; the source retries after one link latency.
            schedule_loss(kLossStaleContext, now + sc_.radio.base_link_latency_ms);
            return;
        }

        resume_on_target(it, *target, now, ev.attempt);
    }

    void resume_on_target(IntentRt& it, NodeRt& target, SimTime now, int attempt) {
        Pending& p = *it.pending;
        // Source side: pause is over, wait for the ack (unless already dead).
        if (it.session && it.session->phase == handover::SessionPhase::Transferring) {
            handover::transition(*it.session, handover::SessionPhase::AwaitingAck, now);
            trace_phase(now, it, *it.session, "package_delivered");
            it.closing = it.session;
        } else {
            it.closing.reset();
        }

        // Target side: a fresh session resumes from the carried state.
        handover::AgentSession s;
        s.intent_id = it.intent.intent_id;
        s.host_node = target.spec.profile.node_id;
        s.phase = handover::SessionPhase::Resuming;
        s.current_state = p.pkg.task_state;
        s.current_state.host_agent = target.spec.profile.node_id;
        s.ranked_fallbacks = p.remaining;
        s.prepare_deadline = 0;
        s.phase_since = now;
        if (s.current_state.executed_units < it.exec_cur ||
            s.current_state.subtask_id != subtask(it).subtask_id) {
            throw core::InvariantViolation("resume would lose progress for " +
                                           it.intent.intent_id);
        }

        it.session = s;
        trace_phase(now, it, *it.session, "package_accepted");
        auto& rr = trace(now, "resume");
        rr["intent"] = it.intent.intent_id;
        rr["node"] = target.spec.profile.node_id;
        rr["subtask"] = s.current_state.subtask_id;
        rr["executed_units"] = s.current_state.executed_units;
        rr["progress"] = s.current_state.progress;
        rr["latency_bonus_pct"] = sc_.knobs.link_latency_bonus_pct;
        handover::transition(*it.session, handover::SessionPhase::Executing, now);
        trace_phase(now, it, *it.session, "resumed");
        auto& cc = trace(now, "control_channel");
        cc["intent"] = it.intent.intent_id;
        cc["user"] = it.user;
        cc["node"] = target.spec.profile.node_id;

        it.session_weights = p.pkg.policy.weights;
        it.latency_bonus_pct = sc_.knobs.link_latency_bonus_pct;
        it.quantum_epoch += 1;

        // Outcome is sealed when the ack lands back at the source.
        OutcomeMeta meta;
        meta.outcome.intent_id = it.intent.intent_id;
        meta.outcome.source = p.source;
        meta.outcome.target = target.spec.profile.node_id;
        meta.outcome.result = attempt == 1 ? handover::HandoverResult::Success
                                           : handover::HandoverResult::FallbackSuccess;
        meta.outcome.attempt_index = attempt;
        meta.outcome.started_at = p.started_at;
        meta.outcome.progress_at_transfer = p.progress_at_transfer;
        meta.outcome.recomputed_units = 0;
        meta.bucket = p.bucket;
        meta.components = p.primary_components;
        it.staged_outcome = std::move(meta);

        Event ack;
        ack.kind = EventKind::HandoverAck;
        ack.intent_id = it.intent.intent_id;
        ack.node_id = p.source;
        ack.peer_id = target.spec.profile.node_id;
        ack.package_id = p.pkg.package_id;
        ack.attempt = attempt;
        q_.schedule(ack, now + sc_.radio.base_link_latency_ms);

        it.pending.reset();
        it.handover_count += 1;
        enqueue_execution(target, it, now);
    }

    void on_package_lost(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end() || !pending_attempt_matches(itf->second, ev)) return;
        IntentRt& it = itf->second;
        const SimTime now = ev.fire_at;
        auto& r = trace(now, "package_lost");
        r["intent"] = ev.intent_id;
        r["package"] = ev.package_id;
        r["to"] = ev.peer_id;
        r["attempt"] = ev.attempt;
        r["reason"] = loss_reason(ev.aux_int);
        if (!it.pending->remaining.empty()) {
            send_package(it, now);
        } else {
            abort_handover(it, now, "fallbacks_exhausted");
        }
    }

    void abort_handover(IntentRt& it, SimTime now, const std::string& why) {
        Pending& p = *it.pending;
        OutcomeMeta meta;
        meta.outcome.intent_id = it.intent.intent_id;
        meta.outcome.source = p.source;
        meta.outcome.target = p.in_flight;
        meta.outcome.result = handover::HandoverResult::Abort;
        meta.outcome.attempt_index = p.attempts;
        meta.outcome.started_at = p.started_at;
        meta.outcome.finished_at = now;
        meta.outcome.progress_at_transfer = p.progress_at_transfer;
        meta.outcome.recomputed_units = executed_total_lineage(it);
        meta.bucket = p.bucket.empty() ? "unranked" : p.bucket;
        meta.components = p.primary_components;
        trace_outcome(now, meta.outcome, why);
        if (NodeRt* src = node(p.source)) {
            report_to_rendezvous(*src, now, rendezvous::AuditAction::HandoverDecision,
                                 it.intent.intent_id, "outcome=abort " + why);
        }
        it.outcomes.push_back(std::move(meta));
        it.pending.reset();
        fail_session(it, now, ("abort_" + why).c_str());
        resubmit_or_wait(it, now, "abort");
    }

    void trace_outcome(SimTime t, const handover::HandoverOutcome& o, const std::string& note) {
        auto& r = trace(t, "handover_outcome");
        r["intent"] = o.intent_id;
        r["source"] = o.source;
        r["target"] = o.target;
        r["result"] = handover::to_string(o.result);
        r["attempt_index"] = o.attempt_index;
        r["started_at"] = o.started_at;
        r["finished_at"] = o.finished_at;
        r["progress_at_transfer"] = o.progress_at_transfer;
        r["recomputed_units"] = o.recomputed_units;
        if (!note.empty()) r["note"] = note;
    }

    void on_handover_ack(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (!it.staged_outcome) return;
        const SimTime now = ev.fire_at;
        if (it.closing && it.closing->phase == handover::SessionPhase::AwaitingAck) {
            handover::transition(*it.closing, handover::SessionPhase::Completed, now);
            trace_phase(now, it, *it.closing, "acked");
        }
        it.closing.reset();
        OutcomeMeta meta = *it.staged_outcome;
        it.staged_outcome.reset();
        meta.outcome.finished_at = now;
        trace_outcome(now, meta.outcome, "");
        if (NodeRt* src = node(meta.outcome.source)) {
            report_to_rendezvous(*src, now, rendezvous::AuditAction::HandoverDecision,
                                 it.intent.intent_id,
                                 std::string("outcome=") + handover::to_string(meta.outcome.result));
        }
        it.outcomes.push_back(std::move(meta));
    }

    // ---- compute ----

    void on_execution_ready(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (ev.epoch != it.epoch || it.completed || it.failed) return;
        NodeRt* n = node(ev.node_id);
        if (!n || !n->alive) {
            // Host died while the request was in flight.
            if (waan_) recovery_or_resubmit(it, ev.fire_at, "host_down_on_arrival");
            else resubmit_or_wait(it, ev.fire_at, "host_down_on_arrival");
            return;
        }
        if (n->load() >= n->slots()) {
            resubmit_or_wait(it, ev.fire_at, "capacity");
            return;
        }
        handover::AgentSession s;
        s.intent_id = it.intent.intent_id;
        s.host_node = ev.node_id;
        s.phase_since = ev.fire_at;
        if (it.staged_resume) {
            s.phase = handover::SessionPhase::Resuming;
            s.current_state = *it.staged_resume;
            it.staged_resume.reset();
            it.session = s;
            trace_phase(ev.fire_at, it, *it.session, "checkpoint_recovered");
            handover::transition(*it.session, handover::SessionPhase::Executing, ev.fire_at);
            trace_phase(ev.fire_at, it, *it.session, "resumed");
        } else {
            s.phase = handover::SessionPhase::Executing;
            const auto& st = subtask(it);
            s.current_state.subtask_id = st.subtask_id;
            s.current_state.progress = 0.0;
            s.current_state.executed_units = 0;
            s.current_state.host_agent = ev.node_id;
            s.current_state.checkpoint_time = ev.fire_at;
            s.current_state.context = it.intent.ttl.context;
            it.session = s;
            auto& r = trace(ev.fire_at, "execution_ready");
            r["intent"] = it.intent.intent_id;
            r["node"] = ev.node_id;
            r["subtask"] = st.subtask_id;
        }
        enqueue_execution(*n, it, ev.fire_at);
    }

    void on_quantum_done(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (ev.epoch != it.quantum_epoch || it.completed || it.failed) return;
        if (!it.session || it.session->host_node != ev.node_id ||
            it.session->phase != handover::SessionPhase::Executing) {
            return;
        }
        NodeRt* n = node(ev.node_id);
        if (!n || !n->alive) return;
        const SimTime now = ev.fire_at;
        const auto& st = subtask(it);

        it.exec_cur += 1;
        it.lifetime_executed += 1;
        it.units_since_checkpoint += 1;
        bool recomputed = false;
        if (it.exec_cur <= it.high_water[it.cur]) {
            it.recomputed += 1;
            recomputed = true;
        } else {
            it.high_water[it.cur] = it.exec_cur;
        }
        if (it.exec_cur > st.work_units) {
            throw core::InvariantViolation("executed units exceed work for " + st.subtask_id);
        }

        it.session->current_state.executed_units = it.exec_cur;
        it.session->current_state.progress =
            static_cast<double>(it.exec_cur) / static_cast<double>(st.work_units);
        it.session->current_state.checkpoint_time = now;

        auto& r = trace(now, "quantum_done");
        r["intent"] = it.intent.intent_id;
        r["node"] = ev.node_id;
        r["subtask"] = st.subtask_id;
        r["executed_units"] = it.exec_cur;
        r["recomputed"] = recomputed;

        if (it.exec_cur == st.work_units) {
            auto& sr = trace(now, "subtask_complete");
            sr["intent"] = it.intent.intent_id;
            sr["node"] = ev.node_id;
            sr["subtask"] = st.subtask_id;
            if (it.cur + 1 == it.intent.subtasks.size()) {
                finish_compute(it, *n, now);
                return;
            }
            it.cur += 1;
            it.exec_cur = 0;
            const auto& next = subtask(it);
            it.session->current_state.subtask_id = next.subtask_id;
            it.session->current_state.progress = 0.0;
            it.session->current_state.executed_units = 0;
        }

        if (waan_) {
            if (it.units_since_checkpoint >= sc_.knobs.checkpoint_interval_units) {
                push_checkpoint(it, *n, now);
                it.units_since_checkpoint = 0;
            }
            if (check_proactive_trigger(it, *n, now)) return;
        }

        Event next = ev;
        q_.schedule(next, now + n->spec.profile.quantum_ms());
    }

    // Returns true when a handover was triggered (the executor is released).
    bool check_proactive_trigger(IntentRt& it, NodeRt& n, SimTime now) {
        UserRt& u = user_of(it);
        if (!user_sees(u, n.spec.profile.node_id)) return false;
        if (now - it.last_trigger_at < sc_.knobs.retrigger_cooldown_ms) return false;
        std::optional<SimTime> exit;
        try {
            exit = handover::predict_exit(u.path, n.spec.profile, sc_.radio, now);
        } catch (const handover::NotConnected&) {
            return false;
        }
        SimTime t_prepare = sc_.knobs.t_prepare_ms;
        if (t_prepare == 0) {
            const std::int64_t est = subtask(it).state_size(it.session->current_state.progress) +
                                     sc_.knobs.policy_overhead_bytes + sc_.knobs.link_params_bytes;
            t_prepare = handover::auto_t_prepare_ms(
                transfer_time_ms(sc_.radio, est, n.spec.bandwidth_bps, n.spec.bandwidth_bps),
                sc_.knobs.swarm_deadline_ms);
        }
        if (!handover::should_trigger(exit, now, t_prepare)) return false;
        auto& r = trace(now, "handover_trigger_check");
        r["intent"] = it.intent.intent_id;
        r["node"] = n.spec.profile.node_id;
        r["predicted_exit_ms"] = *exit;
        r["t_prepare_ms"] = t_prepare;
        r["progress"] = it.session->current_state.progress;
        begin_trigger(it, n, now, false);
        return true;
    }

    void finish_compute(IntentRt& it, NodeRt& n, SimTime now) {
        handover::transition(*it.session, handover::SessionPhase::Completed, now);
        trace_phase(now, it, *it.session, "work_done");
        release_executor(n, it.intent.intent_id, now);
        UserRt& u = user_of(it);
        if (user_sees(u, n.spec.profile.node_id)) {
            schedule_result(it, n.spec.profile.node_id, now);
        } else {
            it.result_pending = true;
            it.result_node = n.spec.profile.node_id;
            auto& r = trace(now, "result_held");
            r["intent"] = it.intent.intent_id;
            r["node"] = n.spec.profile.node_id;
        }
    }

    void schedule_result(IntentRt& it, const core::NodeId& from, SimTime now) {
        it.result_pending = false;
        it.result_node = from;
        Event ev;
        ev.kind = EventKind::ResultDelivered;
        ev.intent_id = it.intent.intent_id;
        ev.node_id = from;
        ev.user_id = it.user;
        ev.epoch = it.epoch;
        q_.schedule(ev, now + result_latency(it));
    }

    void on_result_delivered(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (ev.epoch != it.epoch || it.completed || it.failed) return;
        const SimTime now = ev.fire_at;
        UserRt& u = user_of(it);
        const auto verdict = handover::check_ttl(it.intent.ttl, u.ctx, now);
        auto& tv = trace(now, "ttl_verdict");
        tv["intent"] = ev.intent_id;
        tv["stage"] = "result_delivery";
        tv["time_ok"] = verdict.time_ok;
        tv["relevance"] = verdict.relevance;
        tv["valid"] = verdict.valid;
        if (NodeRt* n = node(ev.node_id)) {
            report_to_rendezvous(*n, now, rendezvous::AuditAction::TTLVerdict,
                                 it.intent.intent_id,
                                 std::string(verdict.valid ? "valid" : "stale") + " at result");
        }
        if (!verdict.valid) {
            it.stale_discards += 1;
            auto& sd = trace(now, "stale_discard");
            sd["intent"] = ev.intent_id;
            sd["node"] = ev.node_id;
            sd["stage"] = "result_delivery";
            it.failed = true;
            auto& fr = trace(now, "intent_failed");
            fr["intent"] = ev.intent_id;
            fr["reason"] = "stale_result";
            return;
        }
        it.completed = true;
        it.completed_at = now;
        const SimTime latency = now - it.intent.submitted_at;
        it.qoe_met = latency <= it.intent.qoe.max_latency_ms;
        auto& r = trace(now, "result_delivered");
        r["intent"] = ev.intent_id;
        r["user"] = it.user;
        r["node"] = ev.node_id;
        r["completion_latency_ms"] = latency;
        r["qoe_met"] = it.qoe_met;
        r["executed_units"] = it.lifetime_executed;
        r["recomputed_units"] = it.recomputed;
        apply_learning(it, now);
    }

    // Outcome-driven updates land on the agent that made each decision.
    void apply_learning(IntentRt& it, SimTime now) {
        for (const auto& meta : it.outcomes) {
            NodeRt* src = node(meta.outcome.source);
            if (!src) continue;
            const bool positive =
                adapt::counts_as_success(meta.outcome.result) && it.qoe_met;
            src->weights = adapt::update_weights(src->weights, positive, meta.components,
                                                 sc_.knobs.eta);
            adapt::OutcomeRecord rec;
            rec.outcome = meta.outcome;
            rec.bucket = meta.bucket;
            rec.qoe_met = it.qoe_met;
            rec.completion_latency_ms = static_cast<double>(now - it.intent.submitted_at);
            adapt::record_outcome(src->log, rec);
            auto& r = trace(now, "policy_update");
            r["agent"] = meta.outcome.source;
            r["intent"] = it.intent.intent_id;
            r["bucket"] = meta.bucket;
            r["result"] = handover::to_string(meta.outcome.result);
            r["positive"] = positive;
            r["weights"] = weights_json(src->weights);
        }
    }

    void on_ttl_expired(const Event& ev) {
        auto itf = intents_.find(ev.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (ev.epoch != it.epoch || it.completed || it.failed) return;
        const SimTime now = ev.fire_at;
        it.failed = true;
        auto& r = trace(now, "ttl_expired");
        r["intent"] = ev.intent_id;
        fail_session(it, now, "ttl_expired");
        fail_closing(it, now, "ttl_expired");
        it.pending.reset();
        it.staged_outcome.reset();
    }

    // ---- links, mobility, faults ----

    void diff_user_links(UserRt& u, SimTime now) {
        auto fresh = compute_connected(u, now);
        std::vector<core::NodeId> lost, gained;
        std::set_difference(u.connected.begin(), u.connected.end(), fresh.begin(), fresh.end(),
                            std::back_inserter(lost));
        std::set_difference(fresh.begin(), fresh.end(), u.connected.begin(), u.connected.end(),
                            std::back_inserter(gained));
        u.connected = std::move(fresh);
        for (const auto& id : lost) {
            Event ev;
            ev.kind = EventKind::LinkLost;
            ev.user_id = u.spec.user_id;
            ev.node_id = id;
            q_.schedule(ev, now);
        }
        for (const auto& id : gained) {
            Event ev;
            ev.kind = EventKind::LinkEstablished;
            ev.user_id = u.spec.user_id;
            ev.node_id = id;
            q_.schedule(ev, now);
        }
    }

    void on_user_moved(const Event& ev) {
        for (auto& [id, u] : users_) diff_user_links(u, ev.fire_at);
        const SimTime next = ev.fire_at + sc_.knobs.mobility_tick_ms;
        if (next <= sc_.end_time_ms) {
            Event tick;
            tick.kind = EventKind::UserMoved;
            q_.schedule(tick, next);
        }
    }

    void on_link_lost(const Event& ev) {
        auto& r = trace(ev.fire_at, "link_lost");
        r["user"] = ev.user_id;
        r["node"] = ev.node_id;
        UserRt& u = users_.at(ev.user_id);
        auto itf = intents_.find(u.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (it.completed || it.failed) return;
        if (!it.session || it.session->host_node != ev.node_id ||
            handover::is_terminal(it.session->phase)) {
            return;
        }
        const SimTime now = ev.fire_at;
        NodeRt* n = node(ev.node_id);

        if (!waan_) {
            fail_session(it, now, "link_lost");
            resubmit_or_wait(it, now, "link_lost");
            return;
        }
        switch (it.session->phase) {
            case handover::SessionPhase::Transferring:
            case handover::SessionPhase::AwaitingAck:
                // Transfer already under way; the chain survives user motion.
                return;
            case handover::SessionPhase::HandoverPreparing:
                // Query in flight; ranking will pick a target near the user.
                return;
            case handover::SessionPhase::Executing:
            case handover::SessionPhase::Resuming:
                if (n && n->online()) {
                    begin_trigger(it, *n, now, true);
                } else {
                    fail_session(it, now, "host_unreachable");
                    recovery_or_resubmit(it, now, "host_unreachable");
                }
                return;
            default:
                return;
        }
    }

    void on_link_established(const Event& ev) {
        auto& r = trace(ev.fire_at, "link_established");
        r["user"] = ev.user_id;
        r["node"] = ev.node_id;
        UserRt& u = users_.at(ev.user_id);
        auto itf = intents_.find(u.intent_id);
        if (itf == intents_.end()) return;
        IntentRt& it = itf->second;
        if (it.completed || it.failed) return;
        const SimTime now = ev.fire_at;
        if (it.awaiting_submit) {
            if (it.awaiting_reason == "recovery" && waan_) {
                it.awaiting_submit = false;
                recovery_or_resubmit(it, now, "recovery");
            } else {
                const std::string reason = it.awaiting_reason;
                it.awaiting_submit = false;
                submit_intent(it, now, reason);
            }
            return;
        }
        if (it.result_pending && it.result_node == ev.node_id) {
            schedule_result(it, ev.node_id, now);
        }
    }

    void on_fault(const Event& ev) {
        NodeRt* n = node(ev.node_id);
        if (!n) return;
        const SimTime now = ev.fire_at;
        const auto action = static_cast<cli::FaultAction>(ev.aux_int);
        auto& r = trace(now, "fault");
        r["node"] = ev.node_id;
        r["action"] = cli::to_string(action);
        switch (action) {
            case cli::FaultAction::LinkDown:
                n->link_up = false;
                break;
            case cli::FaultAction::LinkUp:
                if (n->alive) n->link_up = true;
                break;
            case cli::FaultAction::NodeDown:
                n->alive = false;
                n->link_up = false;
                n->running.clear();
                n->fifo.clear();
                handle_node_death(*n, now);
                break;
        }
        for (auto& [id, u] : users_) diff_user_links(u, now);
    }

    void handle_node_death(NodeRt& n, SimTime now) {
        const core::NodeId& dead = n.spec.profile.node_id;
        for (auto& [id, it] : intents_) {
            if (it.completed || it.failed) continue;
            if (it.closing && it.closing->host_node == dead &&
                !handover::is_terminal(it.closing->phase)) {
                fail_closing(it, now, "node_down");
            }
            if (it.result_pending && it.result_node == dead) {
                it.result_pending = false;
                if (waan_) recovery_or_resubmit(it, now, "result_lost");
                else resubmit_or_wait(it, now, "result_lost");
                continue;
            }
            if (!it.session || it.session->host_node != dead ||
                handover::is_terminal(it.session->phase)) {
                continue;
            }
            switch (it.session->phase) {
                case handover::SessionPhase::Transferring:
                    // Package already radiated; the walk continues and any
                    // retry is re-sent by a rendezvous.
                    fail_session(it, now, "node_down");
                    break;
                case handover::SessionPhase::Executing:
                case handover::SessionPhase::Resuming:
                case handover::SessionPhase::HandoverPreparing:
                    fail_session(it, now, "node_down");
                    it.pending.reset();
                    if (waan_) recovery_or_resubmit(it, now, "node_down");
                    else resubmit_or_wait(it, now, "node_down");
                    break;
                default:
                    fail_session(it, now, "node_down");
                    break;
            }
        }
    }

    void on_intent_submitted(const Event& ev) {
        UserRt& u = users_.at(ev.user_id);
        const SimTime now = ev.fire_at;
        core::Intent intent = core::decompose(u.spec.intent, u.spec.user_id, now, 0);
        IntentRt it;
        it.intent = std::move(intent);
        it.user = u.spec.user_id;
        it.high_water.assign(it.intent.subtasks.size(), 0);
        u.intent_id = it.intent.intent_id;
        auto [pos, inserted] = intents_.emplace(it.intent.intent_id, std::move(it));
        if (!inserted) throw core::InvariantViolation("duplicate intent id");
        submit_intent(pos->second, now, "initial");
    }

    // ---- invariants ----

    void check_invariants() {
        for (const auto& [id, it] : intents_) {
            int holders = 0;
            if (it.session && handover::holds_execution(it.session->phase)) holders += 1;
            if (it.closing && handover::holds_execution(it.closing->phase)) holders += 1;
            if (holders > 1) {
                throw core::InvariantViolation("split brain: two executing sessions for " + id);
            }
        }
    }

    // ---- setup and the loop ----

    void setup() {
        waan_ = sc_.mode == cli::RunMode::WAAN;
        for (const auto& ns : sc_.nodes) {
            NodeRt n;
            n.spec = ns;
            n.weights = core::canonical(sc_.knobs.initial_weights);
            if (ns.profile.is_rendezvous) n.store.emplace(ns.profile.node_id);
            nodes_.emplace(ns.profile.node_id, std::move(n));
        }
        for (const auto& us : sc_.users) {
            UserRt u;
            u.spec = us;
            Rng mob = root_.substream("mobility:" + us.user_id);
            u.path = materialize(us.path, sc_.world, sc_.end_time_ms, mob);
            u.ctx = core::ContextTag{us.zone_id, 1};
            users_.emplace(us.user_id, std::move(u));
        }
        auto& hdr = trace(0, "run_start");
        hdr["schema"] = kTraceSchema;
        hdr["name"] = sc_.name;
        hdr["mode"] = cli::to_string(sc_.mode);
        hdr["seed"] = sc_.seed;
        hdr["scenario_hash"] = cli::scenario_hash(sc_);
        hdr["scenario"] = cli::to_json(sc_);

        Event tick;
        tick.kind = EventKind::UserMoved;
        q_.schedule(tick, 0);
        for (const auto& us : sc_.users) {
            Event ev;
            ev.kind = EventKind::IntentSubmitted;
            ev.user_id = us.user_id;
            q_.schedule(ev, us.submit_at_ms);
        }
        for (const auto& f : sc_.faults) {
            Event ev;
            ev.kind = EventKind::FaultInjected;
            ev.node_id = f.node_id;
            ev.aux_int = static_cast<std::int64_t>(f.action);
            q_.schedule(ev, f.at_ms);
        }
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EventKind::IntentSubmitted: on_intent_submitted(ev); break;
            case EventKind::ExecutionReady: on_execution_ready(ev); break;
            case EventKind::ComputeQuantumDone: on_quantum_done(ev); break;
            case EventKind::UserMoved: on_user_moved(ev); break;
            case EventKind::LinkLost: on_link_lost(ev); break;
            case EventKind::LinkEstablished: on_link_established(ev); break;
            case EventKind::HandoverTriggered: on_handover_triggered(ev); break;
            case EventKind::MetricQuery: on_metric_query(ev); break;
            case EventKind::MetricReply: on_metric_reply(ev); break;
            case EventKind::SwarmRankDue: on_swarm_rank_due(ev); break;
            case EventKind::PackageSent: on_package_sent(ev); break;
            case EventKind::PackageDelivered: on_package_delivered(ev); break;
            case EventKind::PackageLost: on_package_lost(ev); break;
            case EventKind::HandoverAck: on_handover_ack(ev); break;
            case EventKind::TTLExpired: on_ttl_expired(ev); break;
            case EventKind::ResultDelivered: on_result_delivered(ev); break;
            case EventKind::CheckpointDue: on_checkpoint_due(ev); break;
            case EventKind::FaultInjected: on_fault(ev); break;
        }
    }

    void write_footer() {
        auto& r = trace(sc_.end_time_ms, "run_end");
        auto intents = ojson::array();
        for (const auto& [id, it] : intents_) {
            ojson row;
            row["intent"] = id;
            row["user"] = it.user;
            row["completed"] = it.completed;
            row["failed"] = it.failed;
            row["completed_at"] = it.completed_at;
            row["completion_latency_ms"] =
                it.completed ? it.completed_at - it.intent.submitted_at : -1;
            row["qoe_met"] = it.qoe_met;
            row["executed_units"] = it.lifetime_executed;
            row["recomputed_units"] = it.recomputed;
            row["resubmissions"] = it.resubmissions;
            row["stale_discards"] = it.stale_discards;
            auto outs = ojson::array();
            for (const auto& meta : it.outcomes) {
                outs.push_back(ojson{
                    {"source", meta.outcome.source},
                    {"target", meta.outcome.target},
                    {"result", handover::to_string(meta.outcome.result)},
                    {"attempt_index", meta.outcome.attempt_index},
                    {"progress_at_transfer", meta.outcome.progress_at_transfer},
                    {"recomputed_units", meta.outcome.recomputed_units}});
            }
            row["outcomes"] = std::move(outs);
            intents.push_back(std::move(row));
        }
        r["intents"] = std::move(intents);
        auto agents = ojson::array();
        for (const auto& [id, n] : nodes_) {
            ojson row;
            row["node"] = id;
            row["weights"] = weights_json(n.weights);
            auto buckets = ojson::array();
            for (const auto& [bucket, stats] : n.log.buckets) {
                buckets.push_back(ojson{{"bucket", bucket},
                                        {"success", stats.success},
                                        {"failure", stats.failure}});
            }
            row["buckets"] = std::move(buckets);
            agents.push_back(std::move(row));
        }
        r["agents"] = std::move(agents);
    }

  public:
    RunResult run_impl() {
        setup();
        while (!q_.empty() && q_.next_fire_at() <= sc_.end_time_ms) {
            const Event ev = q_.pop();
            dispatch(ev);
            check_invariants();
        }
        write_footer();
        RunResult out;
        out.trace = tr_.take();
        for (const auto& [id, n] : nodes_) {
            if (n.store) out.audits.emplace_back(id, n.store->audit_log());
        }
        return out;
    }
};

RunResult Simulation::run() { return run_impl(); }

}  // namespace

RunResult run(const cli::Scenario& scenario) {
    const auto check = cli::validate_scenario(scenario);
    if (!check.ok()) throw core::ValidationFailure(check.violations);
    Simulation sim(scenario);
    return sim.run();
}

std::string audits_to_jsonl(const RunResult& result, const cli::Scenario& scenario) {
    std::string out;
    ojson hdr;
    hdr["schema"] = kAuditSchema;
    hdr["name"] = scenario.name;
    hdr["mode"] = cli::to_string(scenario.mode);
    hdr["seed"] = scenario.seed;
    hdr["scenario_hash"] = cli::scenario_hash(scenario);
    out += hdr.dump();
    out += '\n';
    for (const auto& [node, records] : result.audits) {
        for (const auto& rec : records) {
            ojson row;
            row["node"] = node;
            row["t"] = rec.t;
            row["action"] = rendezvous::to_string(rec.action);
            row["intent"] = rec.intent_id;
            row["reporter"] = rec.reporter;
            row["detail"] = rec.detail;
            out += row.dump();
            out += '\n';
        }
    }
    return out;
}

}  // namespace waan::sim
