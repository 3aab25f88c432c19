#include "marvv/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "marvv/error.hpp"

namespace marvv {

namespace {

constexpr double kMinWaveDepth = 0.1;  // m

bool finite_state(const VesselState& s) {
    return std::isfinite(s.position.x) && std::isfinite(s.position.y) && std::isfinite(s.heading) &&
           std::isfinite(s.speed) && std::isfinite(s.sway_velocity) && std::isfinite(s.yaw_rate) &&
           std::isfinite(s.rudder_angle) && std::isfinite(s.propeller_setting);
}

std::size_t tick_count(const Scenario& s) { return static_cast<std::size_t>(std::llround(s.duration / s.dt)); }

}  // namespace

DepthGrid scenario_depth_grid(const Scenario& s) {
    if (s.bathymetry.kind == BathymetrySource::Kind::raster) {
        std::filesystem::path p = s.bathymetry.path;
        if (p.is_relative() && !s.base_dir.empty()) p = s.base_dir / p;
        return load_raster(p, s.bathymetry.format);
    }
    const Vec2 lo = s.area.local_min(), hi = s.area.local_max();
    const double cs = s.bathymetry.cell_size;
    const auto cols = static_cast<std::size_t>(std::ceil((hi.x - lo.x) / cs));
    const auto rows = static_cast<std::size_t>(std::ceil((hi.y - lo.y) / cs));
    return DepthGrid(lo, cs, std::max<std::size_t>(rows, 1), std::max<std::size_t>(cols, 1), s.bathymetry.flat_depth);
}

TargetTruth target_state_at(const TargetSpec& spec, double t) {
    TargetTruth out;
    out.id = spec.id;
    out.length = spec.length;
    out.beam = spec.beam;
    out.rcs = spec.rcs;
    Vec2 pos = spec.position;
    double heading = spec.heading;
    double remaining = spec.speed * t;
    for (const Vec2& wp : spec.waypoints) {
        const Vec2 leg = wp - pos;
        const double len = norm(leg);
        if (len <= 0.0) continue;
        heading = bearing_of(leg);
        if (remaining <= len) break;
        remaining -= len;
        pos = wp;
    }
    // After the last waypoint the target keeps its final course.
    out.position = pos + heading_unit(heading) * remaining;
    out.heading = wrap_angle(heading);
    out.velocity = velocity_from(heading, spec.speed);
    return out;
}

SimulationLog run(const Scenario& sc) {
    validate(sc);
    const std::size_t n = tick_count(sc);
    const double dt = sc.dt;

    SimulationLog log;
    log.header.build_version = MARVV_VERSION;
    log.header.scenario_json = scenario_to_json(sc, true);
    log.header.scenario_hash = scenario_hash(sc);
    log.header.seed = sc.seed;
    log.header.dt = dt;
    log.header.duration = sc.duration;
    log.header.safety_radius = sc.autonomy.cdca.safety_radius;
    for (const auto& t : sc.targets) log.header.target_ids.push_back(t.id);
    log.ticks.reserve(n + 1);

    const DepthGrid depth = scenario_depth_grid(sc);
    const OccupancyGrid occ = build_occupancy(depth, sc.ego.params.draft, sc.autonomy.ukc);
    const VesselParams& vp = sc.ego.params;

    VesselState ego = sc.ego.initial;
    const auto start_cell = occ.cell_of(ego.position);
    if (!start_cell || occ.is_blocked(*start_cell)) {
        fail(ErrorCode::grounding, "ego initial position is not on a navigable cell");
    }

    CounterRng rng(sc.seed);
    const PhysicalWeather wx = severity_to_physical(sc.weather, sc.severity_map);
    const SeaStateRealization sea = make_sea_state(wx.significant_wave_height, wx.peak_period, sc.sea, rng);

    const PlanResult global = plan_global(occ, ego.position, sc.ego.goal);
    if (!global.feasible) {
        fail(ErrorCode::validation, "no navigable route from the ego start to its goal");
    }

    std::map<std::string, Track> tracks;
    std::vector<TargetEstimate> estimates;
    TriggerLatch latch(sc.autonomy.trigger_release_delay);
    ControllerState ctrl;

    std::vector<Vec2> plan = global.waypoints;
    PlannerKind kind = PlannerKind::global;
    std::uint64_t plan_id = 0;
    bool plan_feasible = true;
    std::size_t active = 1;
    std::size_t global_active = 1;
    bool have_cdca = false;
    CdcaCandidate cdca_choice;
    double cdca_speed = sc.ego.cruise_speed;
    long last_scan_slot = -1;

    const std::size_t nt = sc.targets.size();
    std::vector<TargetTruth> truths(nt);

    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * dt;
        TickRecord rec;
        rec.tick = i;
        rec.time = t;
        rec.ego = ego;
        rec.targets.resize(nt);
        rec.pipeline = kPipelineOrder;

        for (std::size_t k = 0; k < nt; ++k) {
            truths[k] = target_state_at(sc.targets[k], t);
            rec.targets[k].position = truths[k].position;
            rec.targets[k].heading = truths[k].heading;
            rec.targets[k].speed = sc.targets[k].speed;
        }

        // S: radar scan on the update-rate grid
        const long slot = static_cast<long>(std::floor((t + 0.5 * dt) * sc.radar.update_rate));
        const bool scan_now = slot != last_scan_slot;
        rec.scan = scan_now;
        if (scan_now) {
            last_scan_slot = slot;
            const auto dets = scan(truths, sc.obstacles, {ego.position, ego.heading}, sc.radar, wx, rng, t);
            for (const auto& d : dets) {
                auto it = tracks.find(d.target_id);
                Track tr = it == tracks.end() ? Track{d.target_id, {}, {}, {}, 0.0} : it->second;
                tracks[d.target_id] = update_track(std::move(tr), d, sc.radar.track_window);
                for (std::size_t k = 0; k < nt; ++k) {
                    if (sc.targets[k].id != d.target_id) continue;
                    auto& tr_rec = rec.targets[k];
                    tr_rec.detected = true;
                    tr_rec.range = d.range;
                    tr_rec.bearing = d.bearing;
                    tr_rec.measured_position = d.measured_position;
                    tr_rec.measured_velocity = d.measured_velocity;
                    tr_rec.snr_db = d.snr_db;
                    tr_rec.sigma_range = d.sigma_range;
                    tr_rec.sigma_velocity = d.sigma_velocity;
                }
            }
        } else {
            rec.pipeline[0] = '-';
        }

        // F: fusion
        std::vector<Track> track_list;
        track_list.reserve(tracks.size());
        for (const auto& [id, tr] : tracks) track_list.push_back(tr);
        estimates = fuse_tracks(estimates, track_list, i == 0 ? 0.0 : dt, sc.autonomy.fusion);
        for (const auto& e : estimates) {
            for (std::size_t k = 0; k < nt; ++k) {
                if (sc.targets[k].id != e.target_id) continue;
                rec.targets[k].has_estimate = true;
                rec.targets[k].estimated_position = e.position;
                rec.targets[k].estimated_velocity = e.velocity;
            }
        }

        // A: assessment
        const CollisionAssessment ca = assess(estimates, ego.position, ego.velocity(), sc.autonomy.thresholds, t);
        for (const auto& r : ca.targets) {
            for (std::size_t k = 0; k < nt; ++k) {
                if (sc.targets[k].id != r.target_id) continue;
                rec.targets[k].dcpa = r.dcpa;
                rec.targets[k].tcpa = r.tcpa;
                rec.targets[k].flagged = r.flagged;
            }
        }
        rec.trigger_raw = ca.trigger;
        const bool trigger = latch.update(ca.trigger, t);
        rec.trigger = trigger;

        // P: planning. The global guidance runs every tick so its progress along
        // the route is kept while CDCA is in charge.
        const GuidanceOutput g_global = guide(global.waypoints, global_active, ego, sc.autonomy.guidance, sc.ego.cruise_speed);
        global_active = g_global.active;
        if (trigger) {
            const bool rising = kind != PlannerKind::cdca;
            // A committed avoidance course is kept while it stays admissible and the
            // ego is still on its avoidance leg.
            const bool committed = !rising && have_cdca && active == 1 &&
                                   cdca_admissible(cdca_choice, ego, estimates, occ, sc.autonomy.cdca);
            if ((rising || scan_now) && !committed) {
                const CdcaResult cr = cdca_replan(ego, estimates, occ, sc.autonomy.cdca,
                                                  {g_global.path_course, sc.ego.cruise_speed, global.waypoints});
                plan_feasible = cr.plan.feasible;
                if (cr.plan.feasible) {
                    plan = cr.plan.waypoints;
                    active = 1;
                    ++plan_id;
                    cdca_choice = cr.chosen;
                    cdca_speed = cr.chosen.speed;
                    have_cdca = true;
                    kind = PlannerKind::cdca;
                }
                // No admissible course: keep whatever plan is active.
            }
        } else if (kind != PlannerKind::global) {
            plan = global.waypoints;
            kind = PlannerKind::global;
            active = global_active;
            have_cdca = false;
            plan_feasible = true;
            ++plan_id;
        }

        // G: guidance
        GuidanceOutput g;
        if (kind == PlannerKind::global) {
            g = g_global;
            active = global_active;
        } else {
            g = guide(plan, active, ego, sc.autonomy.guidance, cdca_speed);
            active = g.active;
        }
        rec.desired_heading = g.heading;
        rec.desired_speed = g.speed;
        rec.cross_track = g.cross_track;
        rec.planner = kind;
        rec.plan_id = plan_id;
        rec.plan_feasible = plan_feasible;
        rec.active_waypoint = active;

        // C: control
        const ControlOutput co = control_step(g.heading, g.speed, ego, sc.autonomy.control, ctrl, dt, vp);
        ctrl = co.state;
        rec.command = co.command;

        // W: environment at the ego
        if (!depth.contains(ego.position)) {
            fail(ErrorCode::out_of_bounds,
                 "ego left the bathymetry grid at tick " + std::to_string(i) + " (t = " + std::to_string(t) + " s)");
        }
        const double h = depth_at(depth, ego.position);
        rec.depth = h;
        rec.grounded = !(h >= vp.draft);
        const WaveLoad load = wave_disturbance(sea, std::max(h, kMinWaveDepth), t, ego.heading, vp);

        // D: dynamics, for every vessel; the last record is not advanced.
        log.ticks.push_back(std::move(rec));
        if (i == n) break;
        ego = step(ego, co.command, load, dt, vp);
        if (!finite_state(ego)) {
            fail(ErrorCode::numerical, "ego state became non-finite at tick " + std::to_string(i + 1));
        }
    }
    return log;
}

}  // namespace marvv
