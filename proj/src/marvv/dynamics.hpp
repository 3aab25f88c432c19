#pragma once

#include <span>
#include <vector>

#include "marvv/geometry.hpp"
#include "marvv/rng.hpp"

namespace marvv {

/// Planar state: surge along heading, sway to starboard, yaw clockwise.
struct VesselState {
    Vec2 position;
    double heading = 0.0;         // rad, (-pi, pi], clockwise from north
    double speed = 0.0;           // surge U, m/s, >= 0
    double sway_velocity = 0.0;   // m/s, positive to starboard
    double yaw_rate = 0.0;        // rad/s
    double rudder_angle = 0.0;    // rad, positive turns to starboard
    double propeller_setting = 0.0;  // [0, 1]

    Vec2 velocity() const;
};

/// Reduced Nomoto-plus-surge model constants; defaults are S175-plausible.
struct VesselParams {
    double length = 175.0;
    double beam = 25.4;
    double draft = 9.5;
    double nomoto_gain = 0.06;            // K, 1/s
    double nomoto_time_constant = 30.0;   // T, s
    double speed_time_constant = 60.0;    // tau_U, s
    double sway_time_constant = 20.0;     // s
    double max_speed = 12.0;              // m/s
    double max_rudder = deg2rad(35.0);    // rad
    double rudder_rate_limit = deg2rad(3.0);  // rad/s
    double wave_force_gain = 0.04;        // equivalent acceleration per unit wave-slope acceleration
};

void validate(const VesselParams& p);

struct WaveComponent {
    double amplitude = 0.0;   // m
    double omega = 0.0;       // rad/s
    double wavenumber = 0.0;  // 1/m, deep water
    double phase = 0.0;       // rad, [0, 2pi)
};

struct SeaStateRealization {
    std::vector<WaveComponent> components;  // strictly increasing omega
    double significant_wave_height = 0.0;
    double peak_period = 1.0;
    double direction = 0.0;  // rad, direction the waves travel toward (nautical)
};

/// JONSWAP density S(omega) in m^2 s, normalised so that 4 sqrt(m0) ~= Hs.
std::vector<double> jonswap_spectrum(double hs, double tp, double gamma_shape, std::span<const double> omegas);

/// Solves omega^2 = g k tanh(k h) by Newton iteration from the deep-water root.
double finite_depth_wavenumber(double omega, double depth);

struct SeaStateOptions {
    double gamma_shape = 3.3;
    std::size_t components = 32;
    double omega_min = 0.2;
    double omega_max = 3.0;
    double direction = 0.0;
};

/// Equal-spacing discretisation with random phases drawn from `rng`.
SeaStateRealization make_sea_state(double hs, double tp, const SeaStateOptions& opts, CounterRng& rng);

struct WaveLoad {
    double surge = 0.0;  // m/s^2
    double sway = 0.0;   // m/s^2
    double yaw = 0.0;    // rad/s^2
};

/// Equivalent accelerations from the superposed wave slope at time t. Components
/// that feel the bottom (k h < pi) use the finite-depth wavenumber at `depth_here`.
WaveLoad wave_disturbance(const SeaStateRealization& sea, double depth_here, double t, double heading,
                          const VesselParams& params);

struct ActuatorCommand {
    double rudder = 0.0;     // rad
    double propeller = 0.0;  // [0, 1]
};

/// Advances one step: rate-limited rudder, Nomoto yaw, first-order surge, damped
/// sway, explicit midpoint integration of the kinematics.
VesselState step(const VesselState& state, const ActuatorCommand& cmd, const WaveLoad& load, double dt,
                 const VesselParams& params);

}  // namespace marvv
