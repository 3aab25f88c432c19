#include "marvv/radar.hpp"

#include <algorithm>
#include <cmath>

#include "marvv/error.hpp"

namespace marvv {

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

ObstacleShape::ObstacleShape(std::string id, std::vector<Vec2> footprint, ObstacleKind kind)
    : id_(std::move(id)), footprint_(std::move(footprint)), kind_(kind) {
    const std::size_t n = footprint_.size();
    require(n >= 3, ErrorCode::validation, "obstacle '" + id_ + "' needs at least 3 vertices");
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        require(std::isfinite(footprint_[i].x) && std::isfinite(footprint_[i].y), ErrorCode::validation,
                "obstacle '" + id_ + "' has a non-finite vertex");
        area2 += cross(footprint_[i], footprint_[(i + 1) % n]);
    }
    require(std::abs(area2) > 0.0, ErrorCode::validation, "obstacle '" + id_ + "' is degenerate (zero area)");
    if (area2 < 0.0) {
        std::reverse(footprint_.begin(), footprint_.end());
    }
    // Convex and simple: every turn is a left turn, and the total turning is one revolution.
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = footprint_[(i + 1) % n] - footprint_[i];
        const Vec2 e1 = footprint_[(i + 2) % n] - footprint_[(i + 1) % n];
        require(cross(e0, e1) > 0.0, ErrorCode::validation, "obstacle '" + id_ + "' is not strictly convex");
        turning += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    require(std::abs(turning - kTwoPi) < 1e-6, ErrorCode::validation, "obstacle '" + id_ + "' is not simple");
}

bool ObstacleShape::contains(Vec2 p) const {
    const std::size_t n = footprint_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cross(footprint_[(i + 1) % n] - footprint_[i], p - footprint_[i]) < 0.0) {
            return false;
        }
    }
    return true;
}

bool ObstacleShape::intersects_segment(Vec2 a, Vec2 b) const {
    if (contains(a) || contains(b)) {
        return true;
    }
    const std::size_t n = footprint_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (segments_intersect(a, b, footprint_[i], footprint_[(i + 1) % n])) {
            return true;
        }
    }
    return false;
}

ObstacleShape vessel_footprint(const std::string& id, Vec2 center, double heading, double length, double beam) {
    const Vec2 fwd = heading_unit(heading) * (0.5 * length);
    const Vec2 stbd = Vec2{std::cos(heading), -std::sin(heading)} * (0.5 * beam);
    return ObstacleShape(id,
                         {center + fwd + stbd, center + fwd - stbd, center - fwd - stbd, center - fwd + stbd},
                         ObstacleKind::vessel);
}

bool line_of_sight(Vec2 origin, Vec2 target, std::span<const ObstacleShape> occluders, std::string_view exclude_id) {
    require(!(origin == target), ErrorCode::invalid_argument, "line of sight needs distinct endpoints");
    for (const auto& shape : occluders) {
        if (!exclude_id.empty() && shape.id() == exclude_id) {
            continue;
        }
        if (shape.intersects_segment(origin, target)) {
            return false;
        }
    }
    return true;
}

std::vector<Detection> scan(std::span<const TargetTruth> targets, std::span<const ObstacleShape> static_occluders,
                            const RadarPose& ego, const RadarConfig& cfg, const PhysicalWeather& weather,
                            CounterRng& rng, double timestamp) {
    std::vector<ObstacleShape> occluders(static_occluders.begin(), static_occluders.end());
    for (const auto& t : targets) {
        occluders.push_back(vessel_footprint(t.id, t.position, t.heading, t.length, t.beam));
    }

    const double gamma_r = rain_specific_attenuation(weather.rain_rate, cfg.frequency, cfg.polarization);
    const double gamma_f = fog_specific_attenuation(weather.liquid_water_content, cfg.frequency, weather.air_temperature);

    std::vector<Detection> out;
    for (const auto& t : targets) {
        const double true_range = norm(t.position - ego.position);
        if (!(true_range > 0.0) || true_range > cfg.max_range) {
            continue;
        }
        if (!line_of_sight(ego.position, t.position, occluders, t.id)) {
            continue;
        }
        const AttenuationResult loss = path_attenuation(gamma_r, gamma_f, true_range, cfg.path_mode);
        const double snr = compute_snr_db(cfg, true_range, t.rcs, loss);
        if (cfg.snr_floor_db && snr < *cfg.snr_floor_db) {
            continue;
        }
        const NoiseStds sig = measurement_noise_stds(snr, cfg);

        Detection d;
        d.target_id = t.id;
        d.snr_db = snr;
        d.sigma_range = sig.range;
        d.sigma_velocity = sig.velocity;
        d.timestamp = timestamp;
        // Fixed draw order: position x, y then velocity x, y.
        const double px = rng.normal();
        const double py = rng.normal();
        const double vx = rng.normal();
        const double vy = rng.normal();
        d.measured_position = t.position + Vec2{px, py} * sig.range;
        d.measured_velocity = t.velocity + Vec2{vx, vy} * sig.velocity;
        const Vec2 rel = d.measured_position - ego.position;
        d.range = std::min(std::max(norm(rel), 1e-9), cfg.max_range);
        d.bearing = wrap_angle(bearing_of(rel) - ego.heading);
        out.push_back(std::move(d));
    }
    return out;
}

Vec2 window_velocity(const std::deque<TrackSample>& history) {
    require(history.size() >= 2, ErrorCode::invalid_argument, "velocity fit needs at least two samples");
    double tm = 0.0;
    Vec2 pm;
    for (const auto& s : history) {
        tm += s.t;
        pm += s.position;
    }
    const double n = static_cast<double>(history.size());
    tm /= n;
    pm = pm / n;
    double stt = 0.0;
    Vec2 stp;
    for (const auto& s : history) {
        const double dt = s.t - tm;
        stt += dt * dt;
        stp += (s.position - pm) * dt;
    }
    require(stt > 0.0, ErrorCode::numerical, "velocity fit over coincident timestamps");
    return stp / stt;
}

double window_time_spread(const std::deque<TrackSample>& history) {
    double tm = 0.0;
    for (const auto& s : history) tm += s.t;
    tm /= static_cast<double>(history.size());
    double stt = 0.0;
    for (const auto& s : history) stt += (s.t - tm) * (s.t - tm);
    return stt;
}

Track update_track(Track track, const Detection& det, double window) {
    require(window > 0.0, ErrorCode::invalid_argument, "track window must be positive");
    if (!track.history.empty() && !(det.timestamp > track.history.back().t)) {
        fail(ErrorCode::invalid_argument, "out-of-order detection for track '" + track.target_id + "'");
    }
    if (track.target_id.empty()) {
        track.target_id = det.target_id;
    }
    track.history.push_back({det.timestamp, det.measured_position});
    while (!track.history.empty() && track.history.front().t < det.timestamp - window) {
        track.history.pop_front();
    }
    track.last_measured_velocity = det.measured_velocity;
    track.last_snr_db = det.snr_db;
    track.position_sigma = det.sigma_range;
    if (track.history.size() >= 2) {
        track.velocity_estimate = window_velocity(track.history);
        track.velocity_sigma = det.sigma_range / std::sqrt(window_time_spread(track.history));
    } else {
        track.velocity_estimate = det.measured_velocity;
        track.velocity_sigma = det.sigma_velocity;
    }
    return track;
}

}  // namespace marvv
