#pragma once
// Log-distance path loss radio model and link timing. One model instance is
// shared by every link in a run; per-node variation enters through node
// positions and coverage radii, not through the propagation constants.

#include <cstdint>

#include "waan/core/types.hpp"

namespace waan::sim {

struct RadioModel {
    double tx_power_dbm = 20.0;
    double pathloss_exponent = 2.0;
    double ref_distance_m = 1.0;
    double ref_loss_db = 40.0;
    double noise_floor_dbm = -100.0;
    double connect_threshold_rssi_dbm = -80.0;
    core::SimTime base_link_latency_ms = 5;
    friend bool operator==(const RadioModel&, const RadioModel&) = default;
};

// Received power at distance d: tx - (ref_loss + 10 n log10(d / d_ref)).
// Distances below ref_distance clamp to ref_distance.
double rssi_dbm(const RadioModel& model, double distance_m);

double snr_db(const RadioModel& model, double distance_m);

// Largest distance at which rssi still meets the connect threshold.
double radio_range_m(const RadioModel& model);

// A user is served by a node when it sits inside the coverage radius AND the
// link budget holds. Both boundaries are closed.
bool connected(const RadioModel& model, const core::Vec2& user_pos,
               const core::NodeProfile& node);

// Node-to-node links care only about the link budget; coverage radii bound
// the user-serving area, not the backhaul mesh.
bool node_link(const RadioModel& model, const core::NodeProfile& a,
               const core::NodeProfile& b);

// Serialization plus propagation delay for `bytes` over the slower of the
// two endpoints: ceil(8 * bytes * 1000 / min_bw) + base latency, exact
// integer arithmetic throughout.
core::SimTime transfer_time_ms(const RadioModel& model, std::int64_t bytes,
                               std::int64_t src_bandwidth_bps,
                               std::int64_t dst_bandwidth_bps);

}  // namespace waan::sim
