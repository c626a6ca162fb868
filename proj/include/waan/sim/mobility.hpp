#pragma once
// User mobility. A path is a piecewise-linear sequence of timed waypoints;
// scripted paths come straight from the scenario, random-waypoint paths are
// materialized into the same representation from a named RNG substream at
// run start. Everything downstream (positions, coverage membership, exit
// prediction, residence time) is an analytic function of the waypoints.

#include <optional>
#include <vector>

#include "waan/core/types.hpp"
#include "waan/sim/rng.hpp"

namespace waan::sim {

struct Waypoint {
    core::Vec2 position;
    core::SimTime at_ms = 0;
    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

enum class MobilityMode { Scripted, RandomWaypoint };

struct RandomWaypointParams {
    double speed_min_mps = 1.0;
    double speed_max_mps = 1.0;
    friend bool operator==(const RandomWaypointParams&, const RandomWaypointParams&) = default;
};

struct WorldBounds {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;
    friend bool operator==(const WorldBounds&, const WorldBounds&) = default;
};

struct MobilityPath {
    core::UserId user_id;
    MobilityMode mode = MobilityMode::Scripted;
    std::vector<Waypoint> waypoints;  // strictly increasing at_ms; empty until materialized for RandomWaypoint
    RandomWaypointParams random_params;
    core::Vec2 start;  // starting position for RandomWaypoint materialization
    friend bool operator==(const MobilityPath&, const MobilityPath&) = default;
};

// Fills in waypoints for a RandomWaypoint path: repeatedly pick a uniform
// destination in bounds and a uniform speed, until the path covers horizon.
// Scripted paths are returned unchanged.
MobilityPath materialize(const MobilityPath& path, const WorldBounds& bounds,
                         core::SimTime horizon_ms, Rng& rng);

// Linear interpolation between waypoints; positions clamp to the final
// waypoint after the path ends. Asking before the first waypoint throws
// ValidationFailure, as does querying an unmaterialized path.
core::Vec2 position_at(const MobilityPath& path, core::SimTime t);

// Instantaneous speed in m/s (0 after the path ends).
double speed_at(const MobilityPath& path, core::SimTime t);

// Closed time interval during which the path stays inside one disc.
struct CoverageInterval {
    double enter_ms = 0.0;
    double exit_ms = 0.0;  // +inf when the path ends inside the disc
};

// All maximal intervals within [from_ms, horizon_ms] during which the path
// lies inside the disc (center, radius). Intervals are in time order and
// disjoint. The path is treated as stationary at its final waypoint.
std::vector<CoverageInterval> coverage_intervals(const MobilityPath& path,
                                                 const core::Vec2& center, double radius,
                                                 core::SimTime from_ms,
                                                 core::SimTime horizon_ms);

// First integer millisecond >= now at which the path is strictly outside the
// disc, or nullopt when it never leaves before horizon. The caller is
// responsible for ensuring the path is inside the disc at `now`.
std::optional<core::SimTime> first_exit_ms(const MobilityPath& path, const core::Vec2& center,
                                           double radius, core::SimTime now,
                                           core::SimTime horizon_ms);

// Total milliseconds spent inside the disc during [now, horizon].
core::SimTime residence_ms(const MobilityPath& path, const core::Vec2& center, double radius,
                           core::SimTime now, core::SimTime horizon_ms);

}  // namespace waan::sim
