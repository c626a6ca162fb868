#include "waan/sim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "waan/core/error.hpp"

namespace waan::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Index of the segment [waypoints[i], waypoints[i+1]) containing t, or the
// last waypoint index when t is at or beyond the end of the path.
std::size_t segment_index(const std::vector<Waypoint>& wps, core::SimTime t) {
    std::size_t lo = 0;
    std::size_t hi = wps.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (wps[mid].at_ms <= t) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

void require_usable(const MobilityPath& path, core::SimTime t) {
    if (path.waypoints.empty()) {
        throw core::ValidationFailure(
            {{"path", "random waypoint path queried before materialization"}});
    }
    if (t < path.waypoints.front().at_ms) {
        throw core::ValidationFailure({{"path", "position queried before the path starts"}});
    }
}

// Sub-interval of [t0, t1] during which the linearly moving point stays
// inside the disc, as times; nullopt when it never enters.
std::optional<std::pair<double, double>> segment_inside(const core::Vec2& p0, double t0,
                                                        const core::Vec2& p1, double t1,
                                                        const core::Vec2& c, double r) {
    const double dx = p1.x - p0.x;
    const double dy = p1.y - p0.y;
    const double fx = p0.x - c.x;
    const double fy = p0.y - c.y;
    const double a = dx * dx + dy * dy;
    if (a == 0.0) {
        const double inside = fx * fx + fy * fy <= r * r;
        if (!inside) return std::nullopt;
        return std::make_pair(t0, t1);
    }
    const double b = 2.0 * (fx * dx + fy * dy);
    const double cc = fx * fx + fy * fy - r * r;
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    double s_in = (-b - sq) / (2.0 * a);
    double s_out = (-b + sq) / (2.0 * a);
    s_in = std::max(s_in, 0.0);
    s_out = std::min(s_out, 1.0);
    if (s_in > s_out) return std::nullopt;
    return std::make_pair(t0 + s_in * (t1 - t0), t0 + s_out * (t1 - t0));
}

}  // namespace

MobilityPath materialize(const MobilityPath& path, const WorldBounds& bounds,
                         core::SimTime horizon_ms, Rng& rng) {
    if (path.mode == MobilityMode::Scripted) return path;

    MobilityPath out = path;
    out.waypoints.clear();
    out.waypoints.push_back({path.start, 0});
    core::Vec2 cur = path.start;
    core::SimTime t = 0;
    while (t < horizon_ms) {
        const core::Vec2 dest{rng.uniform_real(bounds.min_x, bounds.max_x),
                              rng.uniform_real(bounds.min_y, bounds.max_y)};
        const double speed =
            rng.uniform_real(path.random_params.speed_min_mps, path.random_params.speed_max_mps);
        const double dist = core::distance(cur, dest);
        if (dist < 1e-9) continue;
        const auto duration =
            std::max<core::SimTime>(1, static_cast<core::SimTime>(std::ceil(dist / speed * 1000.0)));
        t += duration;
        out.waypoints.push_back({dest, t});
        cur = dest;
    }
    return out;
}

core::Vec2 position_at(const MobilityPath& path, core::SimTime t) {
    require_usable(path, t);
    const auto& wps = path.waypoints;
    if (t >= wps.back().at_ms) return wps.back().position;
    const std::size_t i = segment_index(wps, t);
    const auto& a = wps[i];
    const auto& b = wps[i + 1];
    const double frac =
        static_cast<double>(t - a.at_ms) / static_cast<double>(b.at_ms - a.at_ms);
    return {a.position.x + frac * (b.position.x - a.position.x),
            a.position.y + frac * (b.position.y - a.position.y)};
}

double speed_at(const MobilityPath& path, core::SimTime t) {
    require_usable(path, t);
    const auto& wps = path.waypoints;
    if (t >= wps.back().at_ms) return 0.0;
    const std::size_t i = segment_index(wps, t);
    const auto& a = wps[i];
    const auto& b = wps[i + 1];
    const double dist = core::distance(a.position, b.position);
    return dist / (static_cast<double>(b.at_ms - a.at_ms) / 1000.0);
}

std::vector<CoverageInterval> coverage_intervals(const MobilityPath& path,
                                                 const core::Vec2& center, double radius,
                                                 core::SimTime from_ms,
                                                 core::SimTime horizon_ms) {
    require_usable(path, from_ms);
    const auto& wps = path.waypoints;
    std::vector<CoverageInterval> raw;

    auto add = [&raw](double enter, double exit) {
        if (!raw.empty() && enter <= raw.back().exit_ms) {
            raw.back().exit_ms = std::max(raw.back().exit_ms, exit);
        } else {
            raw.push_back({enter, exit});
        }
    };

    for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
        const double t0 = static_cast<double>(wps[i].at_ms);
        const double t1 = static_cast<double>(wps[i + 1].at_ms);
        if (t1 < static_cast<double>(from_ms) || t0 > static_cast<double>(horizon_ms)) continue;
        if (auto span = segment_inside(wps[i].position, t0, wps[i + 1].position, t1, center, radius)) {
            add(span->first, span->second);
        }
    }
    // Stationary tail after the final waypoint.
    const double t_end = static_cast<double>(wps.back().at_ms);
    if (t_end <= static_cast<double>(horizon_ms) &&
        core::distance(wps.back().position, center) <= radius) {
        add(t_end, kInf);
    }

    std::vector<CoverageInterval> out;
    for (auto& iv : raw) {
        const double enter = std::max(iv.enter_ms, static_cast<double>(from_ms));
        const double exit = std::min(iv.exit_ms, static_cast<double>(horizon_ms));
        if (enter > exit) continue;
        // Preserve an unbounded exit so callers can distinguish "never leaves".
        out.push_back({enter, iv.exit_ms >= static_cast<double>(horizon_ms) ? kInf : exit});
    }
    return out;
}

std::optional<core::SimTime> first_exit_ms(const MobilityPath& path, const core::Vec2& center,
                                           double radius, core::SimTime now,
                                           core::SimTime horizon_ms) {
    const auto intervals = coverage_intervals(path, center, radius, now, horizon_ms);
    for (const auto& iv : intervals) {
        if (iv.enter_ms <= static_cast<double>(now) && static_cast<double>(now) <= iv.exit_ms) {
            if (std::isinf(iv.exit_ms)) return std::nullopt;
            // First integer millisecond strictly outside; the boundary itself
            // still counts as covered.
            return static_cast<core::SimTime>(std::floor(iv.exit_ms)) + 1;
        }
    }
    // Already outside: the exit is immediate.
    return now;
}

core::SimTime residence_ms(const MobilityPath& path, const core::Vec2& center, double radius,
                           core::SimTime now, core::SimTime horizon_ms) {
    double total = 0.0;
    for (const auto& iv : coverage_intervals(path, center, radius, now, horizon_ms)) {
        const double exit = std::isinf(iv.exit_ms) ? static_cast<double>(horizon_ms) : iv.exit_ms;
        total += std::max(0.0, exit - iv.enter_ms);
    }
    return std::llround(total);
}

}  // namespace waan::sim
