#include <doctest.h>

#include <cmath>
#include <vector>

#include "marvv/dynamics.hpp"
#include "marvv/error.hpp"

using namespace marvv;

TEST_CASE("zero command at rest is a fixed point") {
    VesselParams p;
    VesselState s;
    s.position = {12, -4};
    s.heading = 0.7;
    for (int i = 0; i < 1000; ++i) s = step(s, {}, {}, 0.05, p);
    CHECK(s.position == Vec2{12, -4});
    CHECK(s.heading == 0.7);
    CHECK(s.speed == 0.0);
}

TEST_CASE("zero rudder holds heading and speed") {
    VesselParams p;
    VesselState s;
    s.heading = deg2rad(30);
    s.speed = 6.0;
    s.propeller_setting = 0.5;
    for (int i = 0; i < 2000; ++i) s = step(s, {0.0, 0.5}, {}, 0.05, p);
    CHECK(s.heading == doctest::Approx(deg2rad(30)));
    CHECK(s.speed == doctest::Approx(6.0));
    CHECK(s.position.x == doctest::Approx(6.0 * 100.0 * std::sin(deg2rad(30))));
}

TEST_CASE("Nomoto steady turn rate") {
    VesselParams p;
    VesselState s;
    s.speed = 8.0;
    const double delta = deg2rad(10);
    for (int i = 0; i < static_cast<int>(20 * p.nomoto_time_constant / 0.05); ++i) s = step(s, {delta, 0.7}, {}, 0.05, p);
    CHECK(s.yaw_rate == doctest::Approx(p.nomoto_gain * delta).epsilon(0.01));
}

TEST_CASE("surge step response reaches 63.2% at tau") {
    VesselParams p;
    VesselState s;
    const double dt = 0.05;
    for (int i = 0; i < static_cast<int>(std::lround(p.speed_time_constant / dt)); ++i) s = step(s, {0.0, 1.0}, {}, dt, p);
    CHECK(s.speed == doctest::Approx((1.0 - std::exp(-1.0)) * p.max_speed).epsilon(0.02));
}

TEST_CASE("rudder limits") {
    VesselParams p;
    VesselState s;
    s.speed = 5.0;
    double prev = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double cmd = (i / 100) % 2 ? -1.0 : 1.0;  // beyond max_rudder
        s = step(s, {cmd, 0.5}, {}, 0.05, p);
        CHECK(std::abs(s.rudder_angle) <= p.max_rudder + 1e-15);
        CHECK(std::abs(s.rudder_angle - prev) <= p.rudder_rate_limit * 0.05 + 1e-12);
        CHECK(s.heading > -kPi);
        CHECK(s.heading <= kPi);
        prev = s.rudder_angle;
    }
    CHECK_THROWS_AS(step(s, {}, {}, 0.0, p), Error);
}

TEST_CASE("heading stays wrapped through many turns") {
    VesselParams p;
    VesselState s;
    s.speed = 10.0;
    for (int i = 0; i < 40000; ++i) {
        s = step(s, {p.max_rudder, 0.8}, {}, 0.05, p);
        REQUIRE(s.heading > -kPi);
        REQUIRE(s.heading <= kPi);
    }
}

TEST_CASE("halving dt barely moves the 300 s endpoint") {
    VesselParams p;
    auto run = [&](double dt) {
        VesselState s;
        s.speed = 8.0;
        const int n = static_cast<int>(std::lround(300.0 / dt));
        for (int i = 0; i < n; ++i) {
            const double t = i * dt;
            s = step(s, {deg2rad(15) * std::sin(t / 40.0), 0.75}, {}, dt, p);
        }
        return s.position;
    };
    const Vec2 a = run(0.1), b = run(0.05);
    CHECK(norm(a - b) < 1e-3 * 8.0 * 300.0);
}

TEST_CASE("JONSWAP spectrum integrates to Hs") {
    std::vector<double> w;
    for (double x = 0.05; x < 6.0; x += 0.001) w.push_back(x);
    for (double hs : {0.5, 1.0, 1.5}) {
        for (double tp : {4.0, 5.5, 7.0}) {
            const auto s = jonswap_spectrum(hs, tp, 3.3, w);
            double m0 = 0;
            for (double v : s) m0 += v * 0.001;
            CHECK(4.0 * std::sqrt(m0) == doctest::Approx(hs).epsilon(0.03));
        }
    }
    CHECK_THROWS_AS(jonswap_spectrum(1.0, 0.0, 3.3, w), Error);
    CHECK_THROWS_AS(jonswap_spectrum(1.0, 5.0, 3.3, std::vector<double>{1.0, 0.5}), Error);
}

TEST_CASE("finite-depth dispersion") {
    for (double w : {0.3, 0.8, 1.5, 2.5}) {
        for (double h : {1.0, 5.0, 20.0, 200.0}) {
            const double k = finite_depth_wavenumber(w, h);
            CHECK(kGravity * k * std::tanh(k * h) == doctest::Approx(w * w).epsilon(1e-10));
            CHECK(k >= w * w / kGravity);
        }
    }
    // shallow-water limit k = w / sqrt(g h)
    CHECK(finite_depth_wavenumber(0.05, 2.0) == doctest::Approx(0.05 / std::sqrt(kGravity * 2.0)).epsilon(1e-3));
    CHECK_THROWS_AS(finite_depth_wavenumber(1.0, 0.0), Error);
}

TEST_CASE("wave disturbance") {
    VesselParams p;
    SeaStateOptions opts;
    CounterRng r1(4), r2(4), r3(4);
    const auto calm = make_sea_state(0.0, 6.0, opts, r1);
    const auto sea1 = make_sea_state(1.0, 6.0, opts, r2);
    const auto sea2 = make_sea_state(2.0, 6.0, opts, r3);
    for (std::size_t i = 0; i < sea1.components.size(); ++i) {
        CHECK(sea1.components[i].phase == sea2.components[i].phase);
        CHECK(sea1.components[i].phase >= 0.0);
        CHECK(sea1.components[i].phase < kTwoPi);
    }
    double rms1 = 0, rms2 = 0;
    for (int i = 0; i < 4000; ++i) {
        const double t = 0.25 * i;
        const auto z = wave_disturbance(calm, 40.0, t, 0.3, p);
        CHECK(z.surge == 0.0);
        CHECK(z.sway == 0.0);
        CHECK(z.yaw == 0.0);
        const auto a = wave_disturbance(sea1, 40.0, t, 0.3, p);
        const auto b = wave_disturbance(sea2, 40.0, t, 0.3, p);
        rms1 += a.surge * a.surge;
        rms2 += b.surge * b.surge;
        const auto again = wave_disturbance(sea1, 40.0, t, 0.3, p);
        CHECK(again.surge == a.surge);
    }
    CHECK(std::sqrt(rms2 / rms1) == doctest::Approx(2.0).epsilon(1e-9));

    SUBCASE("depth only enters through the wavenumber") {
        SeaStateRealization one = sea1;
        one.components = {sea1.components[2]};
        const auto& c = one.components[0];
        const double t = 3.7;
        const auto deep = wave_disturbance(one, 1000.0, t, 0.0, p);
        const auto shallow = wave_disturbance(one, 3.0, t, 0.0, p);
        const double k_deep = c.omega * c.omega / kGravity;
        const double k_shallow = finite_depth_wavenumber(c.omega, 3.0);
        CHECK(shallow.surge / deep.surge == doctest::Approx(k_shallow / k_deep).epsilon(1e-9));
    }
    CHECK_THROWS_AS(wave_disturbance(sea1, 0.0, 1.0, 0.0, p), Error);
}
