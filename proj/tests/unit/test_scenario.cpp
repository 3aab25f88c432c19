#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "marvv/error.hpp"
#include "marvv/log.hpp"
#include "marvv/scenario.hpp"
#include "marvv/simulation.hpp"

using namespace marvv;
using nlohmann::json;

namespace {

const char* kMinimal = R"({
  "schema_version": 1,
  "area": {"lat_min": 33.5666, "lat_max": 33.778, "lon_min": -118.2838, "lon_max": -118.0318},
  "ego": {"initial": {"x": 0, "y": 0, "heading_deg": 0, "speed": 10}, "goal": [0, 11000]},
  "duration": 60,
  "dt": 0.05
})";

ErrorCode code_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::internal;
}

std::string with(const std::string& pointer, const json& value) {
    json j = json::parse(kMinimal);
    j[json::json_pointer(pointer)] = value;
    return j.dump();
}

Scenario short_reference(double duration = 60.0) {
    Scenario s = build_reference_scenario();
    s.duration = duration;
    return s;
}

}  // namespace

TEST_CASE("reference scenario carries the published encounter") {
    const Scenario s = build_reference_scenario();
    CHECK(s.area.lat_min == 33.5666);
    CHECK(s.area.lat_max == 33.7780);
    CHECK(s.area.lon_min == -118.2838);
    CHECK(s.area.lon_max == -118.0318);
    CHECK(s.ego.params.length == 175.0);
    CHECK(s.ego.params.beam == 25.4);
    CHECK(s.ego.params.draft == 9.5);
    CHECK(s.ego.initial.position == Vec2{0, 0});
    CHECK(s.ego.initial.heading == 0.0);
    CHECK(s.ego.initial.speed == 10.0);
    REQUIRE(s.targets.size() == 2);
    CHECK(s.targets[0].id == "V1");
    CHECK(s.targets[0].position == Vec2{3500, 3500});
    CHECK(wrap_angle(s.targets[0].heading - deg2rad(270)) == doctest::Approx(0.0));
    CHECK(s.targets[0].speed == 10.0);
    CHECK(s.targets[1].position == Vec2{0, 7000});
    CHECK(s.targets[1].heading == doctest::Approx(kPi));
    CHECK(s.duration == 600.0);
    CHECK(s.dt == 0.05);
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("local frame is centred on the area") {
    const Scenario s = build_reference_scenario();
    const Vec2 c = s.area.to_local(0.5 * (s.area.lat_min + s.area.lat_max), 0.5 * (s.area.lon_min + s.area.lon_max));
    CHECK(c.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(c.y == doctest::Approx(0.0).epsilon(1e-9));
    const Vec2 lo = s.area.local_min(), hi = s.area.local_max();
    CHECK(hi.y - lo.y == doctest::Approx(6371008.8 * deg2rad(0.2114)).epsilon(1e-9));
    CHECK(s.area.contains_local({0, 11000}));
    CHECK_FALSE(s.area.contains_local({0, 20000}));
}

TEST_CASE("canonical JSON round-trips") {
    const Scenario s = build_reference_scenario();
    const std::string text = scenario_to_json(s);
    const Scenario back = parse_scenario(text);
    CHECK(scenario_to_json(back) == text);
    CHECK(scenario_hash(back) == scenario_hash(s));
    Scenario reseeded = s;
    reseeded.seed = 99;
    CHECK(scenario_hash(reseeded) == scenario_hash(s));
    reseeded.weather.rain = 3;
    CHECK(scenario_hash(reseeded) != scenario_hash(s));
}

TEST_CASE("minimal scenario takes defaults") {
    const Scenario s = parse_scenario(kMinimal);
    CHECK(s.radar_preset == "nominal");
    CHECK(s.autonomy.thresholds.distance == 1000.0);
    CHECK(s.autonomy.thresholds.time == 300.0);
    CHECK(s.seed == 1);
    CHECK(s.targets.empty());
}

TEST_CASE("scenario validation errors") {
    CHECK(code_of("{") == ErrorCode::parse);
    CHECK(code_of(with("/schema_version", 2)) == ErrorCode::validation);
    CHECK(code_of(with("/dt", 0.5)) == ErrorCode::validation);
    CHECK(code_of(with("/dt", 0.0)) == ErrorCode::validation);
    CHECK(code_of(with("/duration", 60.025)) == ErrorCode::validation);
    CHECK(code_of(with("/ego/goal", json::array({0, 50000}))) == ErrorCode::validation);
    CHECK(code_of(with("/weather", {{"rain", 12}})) == ErrorCode::validation);
    CHECK(code_of(with("/bogus_key", 1)) == ErrorCode::validation);
    CHECK(code_of(with("/radar", {{"preset", "huge"}})) == ErrorCode::validation);
    const json t = {{"id", "A"}, {"x", 1000}, {"y", 1000}, {"heading_deg", 0}, {"speed", 5}};
    CHECK(code_of(with("/targets", json::array({t, t}))) == ErrorCode::validation);
    json ego = t;
    ego["id"] = "ego";
    CHECK(code_of(with("/targets", json::array({ego}))) == ErrorCode::validation);
    try {
        parse_scenario(with("/ego/initial/speed", "fast"));
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("/ego/initial/speed") != std::string::npos);
    }
}

TEST_CASE("scripted targets") {
    TargetSpec t;
    t.id = "T";
    t.position = {0, 0};
    t.heading = deg2rad(90);
    t.speed = 10;
    CHECK(target_state_at(t, 10).position.x == doctest::Approx(100));
    t.waypoints = {{0, 100}, {100, 100}};
    const auto a = target_state_at(t, 5);
    CHECK(a.position.y == doctest::Approx(50));
    CHECK(a.heading == doctest::Approx(0.0));
    const auto b = target_state_at(t, 15);
    CHECK(b.position.x == doctest::Approx(50));
    CHECK(b.position.y == doctest::Approx(100));
    const auto c = target_state_at(t, 30);  // past the last waypoint, keeps going east
    CHECK(c.position.x == doctest::Approx(200));
    CHECK(c.heading == doctest::Approx(kPi / 2));
}

TEST_CASE("closed-loop run invariants") {
    const Scenario s = short_reference();
    const SimulationLog log = run(s);
    REQUIRE(log.ticks.size() == 1201);
    CHECK(log.header.target_ids == std::vector<std::string>{"V1", "V2"});
    std::size_t scans = 0;
    for (std::size_t i = 0; i < log.ticks.size(); ++i) {
        const auto& t = log.ticks[i];
        CHECK(t.tick == i);
        CHECK(t.time == doctest::Approx(static_cast<double>(i) * s.dt).epsilon(1e-12));
        if (i > 0) CHECK(t.time - log.ticks[i - 1].time == doctest::Approx(s.dt));
        std::string expected = kPipelineOrder;
        if (!t.scan) expected[0] = '-';
        CHECK(t.pipeline == expected);
        if (t.scan) {
            ++scans;
            const double k = std::round(t.time * s.radar.update_rate);
            CHECK(std::abs(t.time - k / s.radar.update_rate) <= s.dt / 2 + 1e-9);
        }
        CHECK_FALSE(t.grounded);
        CHECK(t.ego.heading > -kPi);
        CHECK(t.ego.heading <= kPi);
    }
    CHECK(scans == 61);
}

TEST_CASE("runs are deterministic and seeds matter") {
    Scenario s = short_reference(30.0);
    const std::string a = log_to_csv(run(s));
    CHECK(log_to_csv(run(s)) == a);
    s.seed = 2;
    const std::string b = log_to_csv(run(s));
    CHECK(b != a);
    CHECK(b.substr(0, b.find('\n')) == a.substr(0, a.find('\n')));
    CHECK(std::count(a.begin(), a.end(), '\n') == std::count(b.begin(), b.end(), '\n'));
}

TEST_CASE("aborts") {
    SUBCASE("ego starting aground") {
        Scenario s = short_reference(10.0);
        s.bathymetry.flat_depth = 5.0;
        CHECK_THROWS_WITH_AS(run(s), doctest::Contains("navigable"), Error);
        try {
            run(s);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::grounding);
        }
    }
    SUBCASE("non-finite state reports the tick") {
        Scenario s = short_reference(10.0);
        s.ego.params.wave_force_gain = 1e308;
        s.weather.sea = 10;
        try {
            run(s);
            FAIL("expected an abort");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::numerical);
            CHECK(std::string(e.what()).find("tick") != std::string::npos);
        }
    }
}

TEST_CASE("raster bathymetry scenario") {
    const Scenario s = load_scenario(MARVV_SOURCE_DIR "/scenarios/shoal_detour.json");
    const DepthGrid g = scenario_depth_grid(s);
    CHECK(g.rows == 150);
    CHECK(depth_at(g, {200, 4500}) == doctest::Approx(4.0));
    Scenario shorter = s;
    shorter.duration = 300;
    const auto log = run(shorter);
    for (const auto& t : log.ticks) {
        REQUIRE_FALSE(t.grounded);
        CHECK(t.depth > s.ego.params.draft);
    }
}
