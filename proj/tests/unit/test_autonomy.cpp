#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "marvv/autonomy.hpp"
#include "marvv/error.hpp"
#include "oracles.hpp"

using namespace marvv;

namespace {

Track track_of(const std::string& id, double t, Vec2 pos, Vec2 vel) {
    Track tr;
    tr.target_id = id;
    tr.history.push_back({t, pos});
    tr.velocity_estimate = vel;
    return tr;
}

TargetEstimate estimate(const std::string& id, Vec2 p, Vec2 v) {
    TargetEstimate e;
    e.target_id = id;
    e.position = p;
    e.velocity = v;
    return e;
}

OccupancyGrid open_water(double size = 20000.0, double cell = 100.0) {
    const auto n = static_cast<std::size_t>(size / cell);
    return build_occupancy(DepthGrid({-size / 2, -size / 2}, cell, n, n, 40.0), 9.5, 1.0);
}

// Does the relative motion come within r of the target during [0, horizon]?
bool ray_hits(Vec2 p, Vec2 v_rel, double r, double horizon) {
    const auto b = oracle::brute_force_cpa(p, -v_rel, horizon, 20001);
    return b.dcpa < r;
}

}  // namespace

TEST_CASE("fusion initialises, corrects and coasts") {
    const AlphaBetaGains g{0.5, 0.1};
    std::vector<Track> tracks{track_of("B", 1.0, {100, 0}, {1, 0}), track_of("A", 1.0, {0, 100}, {0, 1})};
    auto est = fuse_tracks({}, tracks, 0.0, g);
    REQUIRE(est.size() == 2);
    CHECK(est[0].target_id == "A");
    CHECK(est[1].position == Vec2{100, 0});

    // no new sample: predicted forward only
    auto coast = fuse_tracks(est, tracks, 0.5, g);
    CHECK(coast[1].position.x == doctest::Approx(100.5));
    CHECK(coast[1].age == doctest::Approx(0.5));

    // new sample at t = 2 with a 10 m residual
    tracks[0].history.push_back({2.0, {111, 0}});
    auto upd = fuse_tracks(coast, tracks, 0.5, g);
    CHECK(upd[1].position.x == doctest::Approx(101.0 + 0.5 * 10.0));
    CHECK(upd[1].velocity.x == doctest::Approx(1.0 + 0.1 * 10.0 / 1.0));
    CHECK(upd[1].age == 0.0);
    CHECK_THROWS_AS(validate(AlphaBetaGains{0.0, 0.1}), Error);
}

TEST_CASE("alpha-beta converges on a constant-velocity target") {
    const AlphaBetaGains g{0.3, 0.05};
    std::vector<TargetEstimate> est;
    Track tr = track_of("T", 0.0, {0, 0}, {0, 0});
    for (int k = 0; k <= 600; ++k) {
        tr.history.back() = {static_cast<double>(k), Vec2{4.0 * k, -2.0 * k}};
        est = fuse_tracks(est, std::vector<Track>{tr}, k == 0 ? 0.0 : 1.0, g);
    }
    CHECK(est[0].velocity.x == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(est[0].velocity.y == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("cpa against brute force on random encounters") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> up(-8000, 8000), uv(-15, 15);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        const Vec2 pe{up(gen), up(gen)}, ve{uv(gen), uv(gen)}, pt{up(gen), up(gen)}, vt{uv(gen), uv(gen)};
        const auto c = cpa(pe, ve, pt, vt);
        if (c.tcpa <= 0.0) {
            CHECK(c.dcpa == doctest::Approx(norm(pt - pe)));
            continue;
        }
        const auto b = oracle::brute_force_cpa(pt - pe, vt - ve, 2.0 * c.tcpa);
        CHECK(std::abs(c.dcpa - b.dcpa) <= std::max(1e-3 * b.dcpa, b.resolution));
        CHECK(std::abs(c.tcpa - b.tcpa) <= 2.0 * c.tcpa / 9999.0 + 1e-9);
        ++checked;
    }
    CHECK(checked > 100);
    CHECK(cpa({0, 0}, {1, 1}, {10, 0}, {1, 1}).dcpa == doctest::Approx(10.0));
    CHECK(cpa({0, 0}, {1, 1}, {10, 0}, {1, 1}).tcpa == 0.0);
}

TEST_CASE("assessment flags only close, imminent approaches") {
    const std::vector<TargetEstimate> e{estimate("head_on", {0, 5000}, {0, -10}),
                                        estimate("receding", {0, -5000}, {0, -10}),
                                        estimate("wide", {3000, 5000}, {0, -10}),
                                        estimate("distant", {0, 30000}, {0, -10})};
    const auto a = assess(e, {0, 0}, {0, 10}, {}, 1.5);
    CHECK(a.trigger);
    CHECK(a.timestamp == 1.5);
    CHECK(a.targets[0].flagged);
    CHECK_FALSE(a.targets[1].flagged);
    CHECK_FALSE(a.targets[2].flagged);
    CHECK_FALSE(a.targets[3].flagged);
    CHECK(a.targets[0].tcpa == doctest::Approx(250));
    const auto again = assess(e, {0, 0}, {0, 10}, {}, 1.5);
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(again.targets[i].dcpa == a.targets[i].dcpa);
        CHECK(again.targets[i].flagged == a.targets[i].flagged);
    }
    CHECK_FALSE(assess(std::vector<TargetEstimate>{e[1], e[2]}, {0, 0}, {0, 10}, {}, 0).trigger);
    CHECK_THROWS_AS(assess(e, {0, 0}, {0, 10}, {0.0, 300.0}, 0), Error);
}

TEST_CASE("trigger latch") {
    TriggerLatch raw;
    CHECK(raw.update(true, 0.0));
    CHECK_FALSE(raw.update(false, 0.05));
    TriggerLatch held(1.0);
    CHECK(held.update(true, 0.0));
    CHECK(held.update(false, 0.5));
    CHECK_FALSE(held.update(false, 1.0));
}

TEST_CASE("global planner") {
    SUBCASE("open water gives the straight line") {
        const auto occ = open_water();
        const auto p = plan_global(occ, {0, 0}, {0, 8000});
        REQUIRE(p.feasible);
        CHECK(p.waypoints.size() == 2);
        CHECK(p.waypoints.front() == Vec2{0, 0});
        CHECK(p.waypoints.back() == Vec2{0, 8000});
    }
    SUBCASE("goal in shallow water is infeasible") {
        DepthGrid g({0, 0}, 10, 10, 10, 40.0);
        g.at(9, 9) = 2.0;
        const auto occ = build_occupancy(g, 9.5, 1.0);
        CHECK_FALSE(plan_global(occ, {5, 5}, {95, 95}).feasible);
        CHECK_THROWS_AS(plan_global(occ, {95, 95}, {5, 5}), Error);
        CHECK_THROWS_AS(plan_global(occ, {-5, 5}, {5, 5}), Error);
    }
    SUBCASE("wall with a gap") {
        DepthGrid g({0, 0}, 10, 20, 20, 40.0);
        for (std::size_t c = 0; c < 20; ++c) {
            if (c != 15) g.at(10, c) = 2.0;
        }
        const auto occ = build_occupancy(g, 9.5, 1.0);
        const auto p = plan_global(occ, {25, 25}, {25, 175});
        REQUIRE(p.feasible);
        CHECK(p.waypoints.size() > 2);
        for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
            CHECK(oracle::segment_clear(occ, p.waypoints[i - 1], p.waypoints[i]));
        }
        const double best = oracle::grid_shortest_path(occ, *occ.cell_of({25, 25}), *occ.cell_of({25, 175}));
        CHECK(p.grid_path_length == doctest::Approx(best * 10.0));
    }
    SUBCASE("random grids") {
        std::mt19937_64 gen(77);
        int feasible = 0;
        for (int trial = 0; trial < 30; ++trial) {
            const auto occ = build_occupancy(oracle::random_blob_grid(gen, 40, 40, 50.0, 12), 9.5, 1.0);
            std::uniform_real_distribution<double> u(0.0, 2000.0);
            Vec2 s{u(gen), u(gen)}, g{u(gen), u(gen)};
            while (!occ.navigable(s)) s = {u(gen), u(gen)};
            while (!occ.navigable(g)) g = {u(gen), u(gen)};
            const auto p = plan_global(occ, s, g);
            const double best = oracle::grid_shortest_path(occ, *occ.cell_of(s), *occ.cell_of(g));
            CHECK(p.feasible == std::isfinite(best));
            if (!p.feasible) continue;
            ++feasible;
            CHECK(std::abs(p.grid_path_length - best * 50.0) <= 50.0 * std::sqrt(2.0));
            for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
                CHECK(oracle::segment_clear(occ, p.waypoints[i - 1], p.waypoints[i]));
            }
            CHECK(path_length(p.waypoints) <= p.grid_path_length + 2.0 * 50.0 * std::sqrt(2.0));
        }
        CHECK(feasible > 15);
    }
}

TEST_CASE("velocity obstacle") {
    const VelocityObstacle vo{{0, 5000}, {0, -10}, 500};
    CHECK(in_velocity_obstacle({0, 0}, {0, 10}, vo, 600));
    CHECK_FALSE(in_velocity_obstacle({0, 0}, {0, 10}, vo, 200));  // contact after the horizon
    CHECK_FALSE(in_velocity_obstacle({0, 0}, {10, 0}, vo, 600));
    CHECK_FALSE(in_velocity_obstacle({0, 0}, {0, -10}, {{0, 5000}, {0, 0}, 500}, 600));
    CHECK_THROWS_AS(in_velocity_obstacle({0, 0}, {0, 10}, {{0, 100}, {0, 0}, 500}, 600), Error);

    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> up(-6000, 6000), uv(-15, 15);
    for (int i = 0; i < 500; ++i) {
        const Vec2 c{up(gen), up(gen)}, vt{uv(gen), uv(gen)}, ve{uv(gen), uv(gen)};
        if (norm(c) < 600) continue;
        const bool hit = ray_hits(c, ve - vt, 500, 600);
        // The brute-force search samples at ~0.03 s, so only clear cases are compared.
        const auto b = oracle::brute_force_cpa(c, vt - ve, 600, 20001);
        if (std::abs(b.dcpa - 500) < 1.0) continue;
        CHECK(in_velocity_obstacle({0, 0}, ve, {c, vt, 500}, 600) == hit);
    }
}

TEST_CASE("CDCA candidate selection") {
    const CdcaParams params;
    const auto occ = open_water();
    VesselState ego;
    ego.speed = 10;
    const std::vector<Vec2> path{{0, 0}, {0, 10000}};
    const CdcaReference ref{0.0, 10.0, path};

    SUBCASE("candidate order prefers small starboard deviations") {
        const auto c = cdca_candidates(params, ref);
        CHECK(c.size() == 37 * 3);
        CHECK(c[0].deviation == 0.0);
        CHECK(c[0].speed == 10.0);
        CHECK(c[3].deviation > 0.0);
        CHECK(c[6].deviation < 0.0);
    }
    SUBCASE("no traffic keeps the global course") {
        const auto r = cdca_replan(ego, {}, occ, params, ref);
        REQUIRE(r.plan.feasible);
        CHECK(r.chosen.deviation == 0.0);
        CHECK(r.chosen.speed == 10.0);
        CHECK(r.plan.planner_kind == PlannerKind::cdca);
    }
    SUBCASE("head-on target: minimal starboard deviation matches exhaustive enumeration") {
        const std::vector<TargetEstimate> e{estimate("V2", {0, 5000}, {0, -10})};
        const auto r = cdca_replan(ego, e, occ, params, ref);
        REQUIRE(r.plan.feasible);
        CHECK(r.chosen.deviation > 0.0);
        // independent enumeration
        const CdcaCandidate* expected = nullptr;
        const auto cands = cdca_candidates(params, ref);
        for (const auto& c : cands) {
            if (!ray_hits(e[0].position, velocity_from(c.heading, c.speed) - e[0].velocity, vo_radius(params),
                          params.horizon)) {
                expected = &c;
                break;
            }
        }
        REQUIRE(expected != nullptr);
        CHECK(r.chosen.heading == doctest::Approx(expected->heading));
        CHECK(r.chosen.speed == doctest::Approx(expected->speed));
        // nothing admissible was skipped
        for (const auto& c : cands) {
            if (c.heading == r.chosen.heading && c.speed == r.chosen.speed) break;
            CHECK_FALSE(cdca_admissible(c, ego, e, occ, params));
        }
    }
    SUBCASE("corridor between shoals with a crossing target") {
        DepthGrid g({-5000, -5000}, 50, 200, 200, 40.0);
        for (std::size_t r = 0; r < g.rows; ++r) {
            for (std::size_t c = 0; c < g.cols; ++c) {
                const double x = g.cell_center(r, c).x;
                if (std::abs(x) > 600) g.at(r, c) = 3.0;
            }
        }
        const auto occ2 = build_occupancy(g, 9.5, 1.0);
        CdcaParams p2 = params;
        p2.horizon = 300;
        const std::vector<TargetEstimate> e{estimate("X", {-2000, 2000}, {7, 0})};
        const auto r = cdca_replan(ego, e, occ2, p2, ref);
        if (r.plan.feasible) {
            const Vec2 end = ego.position + velocity_from(r.chosen.heading, r.chosen.speed) * p2.horizon;
            CHECK(oracle::segment_clear(occ2, ego.position, end));
            for (std::size_t i = 1; i < r.plan.waypoints.size(); ++i) {
                CHECK(oracle::segment_clear(occ2, r.plan.waypoints[i - 1], r.plan.waypoints[i]));
            }
            CHECK_FALSE(ray_hits(e[0].position, velocity_from(r.chosen.heading, r.chosen.speed) - e[0].velocity,
                                 vo_radius(p2) - 1.0, p2.horizon));
        }
        // ship at the corridor edge with nowhere to go is reported, not forced
        const std::vector<TargetEstimate> wall{estimate("W", {0, 900}, {0, -10})};
        p2.horizon = 600;
        CHECK_FALSE(cdca_replan(ego, wall, occ2, p2, ref).plan.feasible);
    }
    SUBCASE("uncertainty widens the velocity obstacle") {
        TargetEstimate e = estimate("V", {0, 5000}, {0, -10});
        const double base = vo_radius(params, e, ego.position, {0, 10});
        e.position_sigma = 40;
        e.velocity_sigma = 1;
        CHECK(vo_radius(params, e, ego.position, {0, 10}) > base);
        CHECK(base == doctest::Approx(vo_radius(params)));
    }
}

TEST_CASE("line-of-sight guidance") {
    const GuidanceParams gp{500, 200};
    const std::vector<Vec2> wps{{0, 0}, {0, 5000}, {5000, 5000}};
    VesselState ego;
    SUBCASE("on the path steers the segment bearing") {
        ego.position = {0, 1000};
        const auto g = guide(wps, 1, ego, gp, 9.0);
        CHECK(g.heading == doctest::Approx(0.0));
        CHECK(g.speed == 9.0);
        CHECK(g.active == 1);
    }
    SUBCASE("cross-track offset obeys the closed-form law") {
        for (double e : {-300.0, -50.0, 20.0, 400.0}) {
            ego.position = {e, 1000};
            const auto g = guide(wps, 1, ego, gp, 9.0);
            CHECK(g.cross_track == doctest::Approx(e));
            CHECK(g.heading == doctest::Approx(wrap_angle(0.0 - std::atan(e / 500.0))));
        }
    }
    SUBCASE("waypoint switching inside the acceptance radius") {
        ego.position = {0, 4850};
        const auto g = guide(wps, 1, ego, gp, 9.0);
        CHECK(g.active == 2);
        CHECK(g.path_course == doctest::Approx(kPi / 2));
    }
    CHECK_THROWS_AS(guide(std::vector<Vec2>{}, 1, ego, gp, 1.0), Error);
}

TEST_CASE("controller") {
    VesselParams vp;
    const ControllerGains gains;
    VesselState s;
    s.speed = 10;
    SUBCASE("zero error gives zero rudder") {
        const auto out = control_step(0.0, 10.0, s, gains, {}, 0.05, vp);
        CHECK(out.command.rudder == 0.0);
        CHECK(out.command.propeller == doctest::Approx(10.0 / vp.max_speed));
    }
    SUBCASE("large errors saturate exactly") {
        CHECK(control_step(1.5, 10.0, s, gains, {}, 0.05, vp).command.rudder == vp.max_rudder);
        CHECK(control_step(-1.5, 10.0, s, gains, {}, 0.05, vp).command.rudder == -vp.max_rudder);
        CHECK(control_step(0.0, 100.0, s, gains, {}, 0.05, vp).command.propeller == 1.0);
        CHECK(control_step(0.0, 0.0, s, gains, {}, 0.05, vp).command.propeller == 0.0);
    }
    SUBCASE("heading error is wrapped") {
        s.heading = deg2rad(179);
        const auto a = control_step(deg2rad(-179), 10.0, s, gains, {}, 0.05, vp);
        CHECK(a.command.rudder > 0.0);
        CHECK(a.command.rudder < vp.max_rudder);
    }
    SUBCASE("clamped integration limits windup overshoot") {
        // Hold a saturating error for two minutes, then reverse the demand.
        auto overshoot = [&](ControllerGains g) {
            VesselState v;
            v.speed = 10;
            v.propeller_setting = 10 / vp.max_speed;
            ControllerState cs;
            double target = 0.0, worst = 0.0;
            for (int i = 0; i < 16000; ++i) {
                const double t = i * 0.05;
                if (t < 120.0) {
                    target = wrap_angle(v.heading + 1.5);  // saturated to starboard
                } else if (i == 2400) {
                    target = wrap_angle(v.heading - 1.5);  // reversal to port
                }
                const auto out = control_step(target, 10.0, v, g, cs, 0.05, vp);
                cs = out.state;
                v = step(v, out.command, {}, 0.05, vp);
                if (t >= 120.0) worst = std::max(worst, -wrap_angle(v.heading - target));
            }
            return worst;
        };
        ControllerGains no_i = gains;
        no_i.heading_ki = 0.0;
        const double baseline = overshoot(no_i);
        CHECK(overshoot(gains) <= baseline * 1.1 + deg2rad(0.1));
    }
    CHECK_THROWS_AS(control_step(0, 0, s, gains, {}, 0.0, vp), Error);
}
