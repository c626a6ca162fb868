#include "waan/sim/radio.hpp"

#include <algorithm>
#include <cmath>

#include "waan/core/error.hpp"

namespace waan::sim {

double rssi_dbm(const RadioModel& model, double distance_m) {
    const double d = std::max(distance_m, model.ref_distance_m);
    const double path_loss =
        model.ref_loss_db +
        10.0 * model.pathloss_exponent * std::log10(d / model.ref_distance_m);
    return model.tx_power_dbm - path_loss;
}

double snr_db(const RadioModel& model, double distance_m) {
    return rssi_dbm(model, distance_m) - model.noise_floor_dbm;
}

double radio_range_m(const RadioModel& model) {
    const double margin_db =
        model.tx_power_dbm - model.ref_loss_db - model.connect_threshold_rssi_dbm;
    if (margin_db < 0.0) return 0.0;
    return model.ref_distance_m * std::pow(10.0, margin_db / (10.0 * model.pathloss_exponent));
}

bool connected(const RadioModel& model, const core::Vec2& user_pos,
               const core::NodeProfile& node) {
    const double d = core::distance(user_pos, node.position);
    if (d > node.coverage_radius_m) return false;
    return rssi_dbm(model, d) >= model.connect_threshold_rssi_dbm;
}

bool node_link(const RadioModel& model, const core::NodeProfile& a,
               const core::NodeProfile& b) {
    const double d = core::distance(a.position, b.position);
    return rssi_dbm(model, d) >= model.connect_threshold_rssi_dbm;
}

core::SimTime transfer_time_ms(const RadioModel& model, std::int64_t bytes,
                               std::int64_t src_bandwidth_bps,
                               std::int64_t dst_bandwidth_bps) {
    if (bytes < 0) throw core::InvariantViolation("transfer_time_ms: negative byte count");
    const std::int64_t bw = std::min(src_bandwidth_bps, dst_bandwidth_bps);
    if (bw <= 0) throw core::InvariantViolation("transfer_time_ms: non-positive bandwidth");
    const std::int64_t bit_ms = 8 * bytes * 1000;  // bits scaled to ms resolution
    const std::int64_t serialization = (bit_ms + bw - 1) / bw;
    return serialization + model.base_link_latency_ms;
}

}  // namespace waan::sim
