#include "marvv/autonomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "marvv/error.hpp"

namespace marvv {

// ---------------------------------------------------------------- fusion

void validate(const AlphaBetaGains& g) {
    require(g.alpha > 0.0 && g.alpha <= 1.0, ErrorCode::validation, "alpha must be in (0, 1]");
    require(g.beta > 0.0 && g.beta < 2.0, ErrorCode::validation, "beta must be in (0, 2)");
}

std::vector<TargetEstimate> fuse_tracks(std::span<const TargetEstimate> previous, std::span<const Track> tracks,
                                        double dt, AlphaBetaGains gains) {
    std::map<std::string, TargetEstimate> by_id;
    for (const auto& e : previous) {
        TargetEstimate p = e;
        p.position += p.velocity * dt;
        p.age += dt;
        by_id.emplace(p.target_id, std::move(p));
    }
    for (const auto& tr : tracks) {
        if (tr.history.empty()) continue;
        const TrackSample& z = tr.history.back();
        auto it = by_id.find(tr.target_id);
        if (it == by_id.end()) {
            TargetEstimate e;
            e.target_id = tr.target_id;
            e.position = z.position;
            e.velocity = tr.velocity_estimate;
            e.source_snr_db = tr.last_snr_db;
            e.last_update = z.t;
            e.position_sigma = tr.position_sigma;
            e.velocity_sigma = tr.velocity_sigma;
            by_id.emplace(e.target_id, std::move(e));
            continue;
        }
        TargetEstimate& e = it->second;
        if (!(z.t > e.last_update)) continue;  // nothing new: coast
        const double interval = z.t - e.last_update;
        const Vec2 residual = z.position - e.position;
        e.position += residual * gains.alpha;
        e.velocity += residual * (gains.beta / interval);
        e.age = 0.0;
        e.last_update = z.t;
        e.source_snr_db = tr.last_snr_db;
        e.position_sigma = tr.position_sigma;
        e.velocity_sigma = tr.velocity_sigma;
    }
    std::vector<TargetEstimate> out;
    out.reserve(by_id.size());
    for (auto& [id, e] : by_id) out.push_back(std::move(e));
    return out;
}

// ---------------------------------------------------------------- situational awareness

CpaResult cpa(Vec2 ego_position, Vec2 ego_velocity, Vec2 target_position, Vec2 target_velocity) {
    const Vec2 p = target_position - ego_position;
    const Vec2 v = target_velocity - ego_velocity;
    const double vv = norm2(v);
    if (vv < 1e-12) {
        return {norm(p), 0.0};
    }
    const double tcpa = -dot(p, v) / vv;
    return {norm(p + v * std::max(tcpa, 0.0)), tcpa};
}

CollisionAssessment assess(std::span<const TargetEstimate> estimates, Vec2 ego_position, Vec2 ego_velocity,
                           const CollisionThresholds& thresholds, double timestamp) {
    require(thresholds.distance > 0.0 && thresholds.time > 0.0, ErrorCode::invalid_argument,
            "collision thresholds must be positive");
    CollisionAssessment a;
    a.timestamp = timestamp;
    for (const auto& e : estimates) {
        const CpaResult c = cpa(ego_position, ego_velocity, e);
        TargetRisk r{e.target_id, c.dcpa, c.tcpa, c.tcpa > 0.0 && c.tcpa < thresholds.time && c.dcpa < thresholds.distance};
        a.trigger = a.trigger || r.flagged;
        a.targets.push_back(std::move(r));
    }
    return a;
}

bool TriggerLatch::update(bool raw, double t) {
    if (raw) {
        last_raw_true_ = t;
        state_ = true;
    } else if (state_ && t - last_raw_true_ >= release_delay_) {
        state_ = false;
    }
    return state_;
}

// ---------------------------------------------------------------- planning

double path_length(std::span<const Vec2> pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) len += norm(pts[i] - pts[i - 1]);
    return len;
}

PlanResult plan_global(const OccupancyGrid& occ, Vec2 start, Vec2 goal) {
    const auto sc = occ.cell_of(start);
    require(sc.has_value(), ErrorCode::out_of_bounds, "planner start lies outside the occupancy grid");
    require(!occ.is_blocked(*sc), ErrorCode::invalid_argument, "planner start lies in a non-navigable cell");
    PlanResult result;
    result.planner_kind = PlannerKind::global;
    const auto gc = occ.cell_of(goal);
    if (!gc || occ.is_blocked(*gc)) {
        return result;
    }

    const long cols = static_cast<long>(occ.cols), rows = static_cast<long>(occ.rows);
    const std::size_t n = occ.rows * occ.cols;
    auto idx = [&](long r, long c) { return static_cast<std::size_t>(r * cols + c); };
    const std::size_t s_idx = idx(static_cast<long>(sc->row), static_cast<long>(sc->col));
    const std::size_t g_idx = idx(static_cast<long>(gc->row), static_cast<long>(gc->col));
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> g(n, inf);
    std::vector<std::size_t> parent(n, n);
    std::vector<std::uint8_t> closed(n, 0);
    auto h = [&](std::size_t i) {
        const double dr = static_cast<double>(static_cast<long>(i) / cols) - static_cast<double>(gc->row);
        const double dc = static_cast<double>(static_cast<long>(i) % cols) - static_cast<double>(gc->col);
        return std::hypot(dr, dc);
    };
    using Entry = std::pair<double, std::size_t>;  // (f, index); index breaks ties deterministically
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    g[s_idx] = 0.0;
    open.emplace(h(s_idx), s_idx);
    constexpr int dr8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
    constexpr int dc8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
    while (!open.empty()) {
        const auto [f, cur] = open.top();
        open.pop();
        if (closed[cur]) continue;
        closed[cur] = 1;
        if (cur == g_idx) break;
        const long r = static_cast<long>(cur) / cols, c = static_cast<long>(cur) % cols;
        for (int k = 0; k < 8; ++k) {
            const long nr = r + dr8[k], nc = c + dc8[k];
            if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
            if (occ.is_blocked(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc))) continue;
            const bool diagonal = dr8[k] != 0 && dc8[k] != 0;
            if (diagonal && (occ.is_blocked(static_cast<std::size_t>(r), static_cast<std::size_t>(nc)) ||
                             occ.is_blocked(static_cast<std::size_t>(nr), static_cast<std::size_t>(c)))) {
                continue;  // no corner cutting
            }
            const std::size_t ni = idx(nr, nc);
            const double ng = g[cur] + (diagonal ? std::numbers::sqrt2 : 1.0);
            if (ng < g[ni]) {
                g[ni] = ng;
                parent[ni] = cur;
                open.emplace(ng + h(ni), ni);
            }
        }
    }
    if (!closed[g_idx]) {
        return result;
    }
    result.grid_path_length = g[g_idx] * occ.cell_size;

    std::vector<Vec2> raw;
    for (std::size_t i = g_idx; i != n; i = parent[i]) {
        raw.push_back(occ.cell_center(Cell{i / occ.cols, i % occ.cols}));
        if (i == s_idx) break;
    }
    std::reverse(raw.begin(), raw.end());
    raw.front() = start;
    if (raw.size() == 1) {
        raw.push_back(goal);
    } else {
        raw.back() = goal;
    }

    // String pulling: from each anchor, jump to the farthest raw point still in
    // clear line of sight.
    std::vector<Vec2> smooth{raw.front()};
    std::size_t anchor = 0;
    while (anchor + 1 < raw.size()) {
        std::size_t next = anchor + 1;
        for (std::size_t j = raw.size() - 1; j > anchor + 1; --j) {
            if (segment_navigable(occ, raw[anchor], raw[j])) {
                next = j;
                break;
            }
        }
        if (!(raw[next] == smooth.back())) smooth.push_back(raw[next]);
        anchor = next;
    }
    if (smooth.size() == 1) smooth.push_back(goal);  // start and goal coincide
    result.waypoints = std::move(smooth);
    result.feasible = true;
    return result;
}

bool in_velocity_obstacle(Vec2 ego_position, Vec2 candidate_velocity, const VelocityObstacle& obstacle, double horizon) {
    require(obstacle.combined_radius > 0.0, ErrorCode::invalid_argument, "velocity obstacle radius must be positive");
    const Vec2 p = obstacle.center - ego_position;
    const double d = norm(p);
    require(d > obstacle.combined_radius, ErrorCode::invalid_argument,
            "velocity obstacle geometry already overlaps (distance <= combined radius)");
    const Vec2 v = candidate_velocity - obstacle.velocity;
    const double speed = norm(v);
    if (speed < 1e-12) {
        return false;
    }
    const double half_angle = std::asin(obstacle.combined_radius / d);
    const double angle = std::acos(std::clamp(dot(p, v) / (d * speed), -1.0, 1.0));
    if (angle > half_angle) {
        return false;
    }
    // First contact with the disc along the relative ray.
    const double pv = dot(p, v) / speed;
    const double entry_distance = pv - std::sqrt(std::max(0.0, pv * pv - (d * d - obstacle.combined_radius * obstacle.combined_radius)));
    return entry_distance / speed <= horizon;
}

std::vector<CdcaCandidate> cdca_candidates(const CdcaParams& params, const CdcaReference& ref) {
    require(params.heading_step > 0.0 && params.heading_span >= 0.0, ErrorCode::invalid_argument,
            "CDCA heading grid must have a positive step");
    const long n = static_cast<long>(std::floor(params.heading_span / params.heading_step + 1e-9));
    std::vector<CdcaCandidate> out;
    // Evaluation order is the preference order: smallest deviation first, starboard
    // before port at equal deviation, then the faster speed.
    for (long j = 0; j <= n; ++j) {
        for (long sgn : {1L, -1L}) {
            if (j == 0 && sgn < 0) continue;
            const double dev = static_cast<double>(sgn * j) * params.heading_step;
            for (double f : params.speed_factors) {
                out.push_back({wrap_angle(ref.course + dev), f * ref.cruise_speed, dev});
            }
        }
    }
    return out;
}

double vo_radius(const CdcaParams& p, const TargetEstimate& e, Vec2 ego_position, Vec2 candidate_velocity) {
    const double t = std::clamp(cpa(ego_position, candidate_velocity, e).tcpa, 0.0, p.horizon);
    return vo_radius(p) + p.uncertainty_gain * std::hypot(e.position_sigma, e.velocity_sigma * t);
}

bool cdca_admissible(const CdcaCandidate& c, const VesselState& ego, std::span<const TargetEstimate> estimates,
                     const OccupancyGrid& occ, const CdcaParams& params) {
    const Vec2 vel = velocity_from(c.heading, c.speed);
    for (const auto& e : estimates) {
        const Vec2 p = e.position - ego.position;
        const double r = vo_radius(params, e, ego.position, vel);
        if (norm(p) <= r) {
            // Already inside the safety disc: only courses that open the range are allowed.
            if (dot(p, vel - e.velocity) > 0.0) return false;
            continue;
        }
        if (in_velocity_obstacle(ego.position, vel, {e.position, e.velocity, r}, params.horizon)) {
            return false;
        }
    }
    return segment_navigable(occ, ego.position, ego.position + vel * params.horizon);
}

namespace {

// Nearest point on the polyline, as (segment index, along-segment distance).
std::pair<std::size_t, double> project_on_path(std::span<const Vec2> path, Vec2 p) {
    std::size_t best_seg = 0;
    double best_along = 0.0, best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Vec2 a = path[i - 1], ab = path[i] - a;
        const double len = norm(ab);
        const double along = len > 0.0 ? std::clamp(dot(p - a, ab) / len, 0.0, len) : 0.0;
        const Vec2 q = len > 0.0 ? a + ab * (along / len) : a;
        const double d = norm(p - q);
        if (d < best_d) {
            best_d = d;
            best_seg = i - 1;
            best_along = along;
        }
    }
    return {best_seg, best_along};
}

Vec2 point_along(std::span<const Vec2> path, std::size_t seg, double along, double ahead) {
    double remaining = along + ahead;
    for (std::size_t i = seg; i + 1 < path.size(); ++i) {
        const double len = norm(path[i + 1] - path[i]);
        if (remaining <= len && len > 0.0) {
            return path[i] + (path[i + 1] - path[i]) * (remaining / len);
        }
        remaining -= len;
    }
    return path.back();
}

}  // namespace

CdcaResult cdca_replan(const VesselState& ego, std::span<const TargetEstimate> estimates, const OccupancyGrid& occ,
                       const CdcaParams& params, const CdcaReference& ref) {
    CdcaResult out;
    out.plan.planner_kind = PlannerKind::cdca;
    for (const auto& c : cdca_candidates(params, ref)) {
        if (!cdca_admissible(c, ego, estimates, occ, params)) continue;
        out.chosen = c;
        out.plan.feasible = true;
        break;
    }
    if (!out.plan.feasible) {
        return out;
    }
    const Vec2 dir = heading_unit(out.chosen.heading);
    const double lead = std::min(params.lead_time, params.horizon) * out.chosen.speed;
    const Vec2 lead_point = ego.position + dir * std::max(lead, 1.0);
    out.plan.waypoints = {ego.position, lead_point};
    bool rejoined = false;
    if (ref.global_path.size() >= 2) {
        const auto [seg, along] = project_on_path(ref.global_path, lead_point);
        const Vec2 rejoin = point_along(ref.global_path, seg, along, params.rejoin_ahead);
        if (!(rejoin == lead_point) && segment_navigable(occ, lead_point, rejoin)) {
            out.plan.waypoints.push_back(rejoin);
            rejoined = true;
        }
    }
    if (!rejoined) {
        const Vec2 far = ego.position + dir * std::max(params.horizon * out.chosen.speed, 2.0);
        if (!(far == lead_point)) out.plan.waypoints.push_back(far);
    }
    // Post-check: the chosen course must still pass every constraint.
    if (!cdca_admissible(out.chosen, ego, estimates, occ, params)) {
        fail(ErrorCode::internal, "CDCA selected an inadmissible candidate");
    }
    return out;
}

// ---------------------------------------------------------------- guidance and control

GuidanceOutput guide(std::span<const Vec2> waypoints, std::size_t active, const VesselState& ego,
                     const GuidanceParams& params, double commanded_speed) {
    require(!waypoints.empty(), ErrorCode::invalid_argument, "guidance needs at least one waypoint");
    GuidanceOutput out;
    out.speed = commanded_speed;
    if (waypoints.size() == 1) {
        out.active = 0;
        out.heading = bearing_of(waypoints[0] - ego.position);
        out.path_course = out.heading;
        return out;
    }
    std::size_t a = std::clamp<std::size_t>(active, 1, waypoints.size() - 1);
    while (a + 1 < waypoints.size()) {
        const Vec2 from = waypoints[a - 1], to = waypoints[a];
        const Vec2 seg = to - from;
        const double len = norm(seg);
        const bool reached = norm(to - ego.position) < params.accept_radius;
        const bool passed = len > 0.0 && dot(ego.position - from, seg) / len > len;
        if (!reached && !passed) break;
        ++a;
    }
    const Vec2 from = waypoints[a - 1], to = waypoints[a];
    const Vec2 seg = to - from;
    const double len = norm(seg);
    out.active = a;
    if (len <= 0.0) {
        out.heading = bearing_of(to - ego.position);
        out.path_course = out.heading;
        return out;
    }
    const Vec2 t = seg / len;
    const Vec2 stbd{t.y, -t.x};
    out.path_course = bearing_of(t);
    out.cross_track = dot(ego.position - from, stbd);
    out.heading = wrap_angle(bearing_of(t) - std::atan2(out.cross_track, params.lookahead));
    return out;
}

namespace {
constexpr double kHeadingIntegralBand = 0.0872664626;  // 5 deg
}  // namespace

ControlOutput control_step(double desired_heading, double desired_speed, const VesselState& vessel,
                           const ControllerGains& gains, const ControllerState& ctrl, double dt,
                           const VesselParams& params) {
    require(std::isfinite(dt) && dt > 0.0, ErrorCode::invalid_argument, "controller time step must be positive");
    ControlOutput out;
    out.state = ctrl;

    const double e = wrap_angle(desired_heading - vessel.heading);
    const double pd = gains.heading_kp * e - gains.heading_kd * vessel.yaw_rate;
    const double trial_i = ctrl.heading_integral + e * dt;
    const double unsat = pd + gains.heading_ki * trial_i;
    const double rudder = std::clamp(unsat, -params.max_rudder, params.max_rudder);
    // Clamped integration: hold the integrator while saturated in the error's direction,
    // and outside the trim band so large turns do not charge it.
    if (std::abs(e) < kHeadingIntegralBand && (unsat == rudder || (unsat > rudder) != (e > 0.0))) {
        out.state.heading_integral = trial_i;
    }
    out.command.rudder =
        std::clamp(pd + gains.heading_ki * out.state.heading_integral, -params.max_rudder, params.max_rudder);

    const double eu = desired_speed - vessel.speed;
    const double ff = desired_speed / params.max_speed;
    const double trial_ui = ctrl.speed_integral + eu * dt;
    const double unsat_u = ff + gains.speed_kp * eu + gains.speed_ki * trial_ui;
    const double prop = std::clamp(unsat_u, 0.0, 1.0);
    if (unsat_u == prop || (unsat_u > prop) != (eu > 0.0)) {
        out.state.speed_integral = trial_ui;
    }
    out.command.propeller = std::clamp(ff + gains.speed_kp * eu + gains.speed_ki * out.state.speed_integral, 0.0, 1.0);
    return out;
}

}  // namespace marvv
