#include "marvv/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "marvv/error.hpp"

namespace marvv {

Vec2 VesselState::velocity() const {
    const Vec2 stbd{std::cos(heading), -std::sin(heading)};
    return heading_unit(heading) * speed + stbd * sway_velocity;
}

void validate(const VesselParams& p) {
    const double fields[] = {p.length,     p.beam,      p.draft,          p.nomoto_gain,       p.nomoto_time_constant,
                             p.speed_time_constant, p.sway_time_constant, p.max_speed, p.max_rudder,
                             p.rudder_rate_limit};
    for (double v : fields) {
        require(std::isfinite(v) && v > 0.0, ErrorCode::validation, "vessel parameters must be strictly positive");
    }
    require(p.max_rudder <= kPi / 2, ErrorCode::validation, "max rudder angle must not exceed 90 degrees");
    require(std::isfinite(p.wave_force_gain) && p.wave_force_gain >= 0.0, ErrorCode::validation,
            "wave force gain must be non-negative");
}

std::vector<double> jonswap_spectrum(double hs, double tp, double gamma_shape, std::span<const double> omegas) {
    require(!omegas.empty(), ErrorCode::invalid_argument, "JONSWAP needs at least one frequency");
    require(std::isfinite(hs) && hs >= 0.0, ErrorCode::invalid_argument, "Hs must be non-negative");
    require(std::isfinite(tp) && tp > 0.0, ErrorCode::invalid_argument, "Tp must be positive");
    require(gamma_shape >= 1.0, ErrorCode::invalid_argument, "JONSWAP peak enhancement must be >= 1");
    const double wp = kTwoPi / tp;
    // Pierson-Moskowitz shape in (Hs, wp) form times the peak enhancement, with the
    // usual (1 - 0.287 ln gamma) normalisation to keep 4 sqrt(m0) at Hs.
    const double norm = 1.0 - 0.287 * std::log(gamma_shape);
    std::vector<double> s;
    s.reserve(omegas.size());
    double prev = 0.0;
    for (double w : omegas) {
        require(w > 0.0 && w > prev, ErrorCode::invalid_argument, "frequencies must be positive and ascending");
        prev = w;
        const double sigma = w <= wp ? 0.07 : 0.09;
        const double r = std::exp(-(w - wp) * (w - wp) / (2.0 * sigma * sigma * wp * wp));
        const double pm = 5.0 / 16.0 * hs * hs * std::pow(wp, 4) * std::pow(w, -5) * std::exp(-1.25 * std::pow(wp / w, 4));
        s.push_back(norm * pm * std::pow(gamma_shape, r));
    }
    return s;
}

double finite_depth_wavenumber(double omega, double depth) {
    require(std::isfinite(omega) && omega > 0.0, ErrorCode::invalid_argument, "omega must be positive");
    require(std::isfinite(depth) && depth > 0.0, ErrorCode::invalid_argument, "depth must be positive");
    const double w2 = omega * omega;
    double k = w2 / kGravity;  // deep-water root; always left of the finite-depth root
    for (int it = 0; it < 100; ++it) {
        const double th = std::tanh(k * depth);
        const double f = kGravity * k * th - w2;
        if (std::abs(f) < 1e-12 * w2) {
            return k;
        }
        const double df = kGravity * (th + k * depth * (1.0 - th * th));
        k -= f / df;
        if (!(k > 0.0)) {
            break;
        }
    }
    std::ostringstream os;
    os << "finite-depth dispersion did not converge for omega=" << omega << ", depth=" << depth;
    fail(ErrorCode::numerical, os.str());
}

SeaStateRealization make_sea_state(double hs, double tp, const SeaStateOptions& opts, CounterRng& rng) {
    require(opts.components >= 1, ErrorCode::invalid_argument, "sea state needs at least one component");
    require(opts.omega_min > 0.0 && opts.omega_max > opts.omega_min, ErrorCode::invalid_argument,
            "sea state frequency band is empty");
    SeaStateRealization sea;
    sea.significant_wave_height = hs;
    sea.peak_period = tp;
    sea.direction = opts.direction;
    const std::size_t n = opts.components;
    const double dw = (opts.omega_max - opts.omega_min) / static_cast<double>(n);
    std::vector<double> omegas(n);
    for (std::size_t i = 0; i < n; ++i) {
        omegas[i] = opts.omega_min + (static_cast<double>(i) + 0.5) * dw;
    }
    const auto s = jonswap_spectrum(hs, tp, opts.gamma_shape, omegas);
    sea.components.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = sea.components[i];
        c.omega = omegas[i];
        c.amplitude = std::sqrt(2.0 * s[i] * dw);
        c.wavenumber = omegas[i] * omegas[i] / kGravity;
        c.phase = kTwoPi * (rng.uniform() - 0.5) + kPi;  // [0, 2pi)
        if (c.phase >= kTwoPi) c.phase -= kTwoPi;
    }
    return sea;
}

WaveLoad wave_disturbance(const SeaStateRealization& sea, double depth_here, double t, double heading,
                          const VesselParams& params) {
    require(depth_here > 0.0, ErrorCode::invalid_argument, "wave loads need positive local depth");
    double slope = 0.0;
    for (const auto& c : sea.components) {
        if (c.amplitude == 0.0) continue;
        double k = c.wavenumber;
        if (k * depth_here < kPi) {
            k = finite_depth_wavenumber(c.omega, depth_here);
        }
        slope += c.amplitude * k * std::sin(c.omega * t + c.phase);
    }
    const double rel = sea.direction - heading;  // encounter angle, 0 = following sea
    const double accel = params.wave_force_gain * kGravity * slope;
    return {accel * std::cos(rel), accel * std::sin(rel), accel * std::sin(2.0 * rel) / params.length};
}

namespace {

struct Deriv {
    Vec2 position;
    double heading, speed, sway, yaw_rate;
};

Deriv derivative(const VesselState& s, double target_speed, const WaveLoad& load, const VesselParams& p) {
    const Vec2 fwd = heading_unit(s.heading);
    const Vec2 stbd{std::cos(s.heading), -std::sin(s.heading)};
    return {fwd * s.speed + stbd * s.sway_velocity, s.yaw_rate,
            (target_speed - s.speed) / p.speed_time_constant + load.surge,
            -s.sway_velocity / p.sway_time_constant + load.sway,
            (p.nomoto_gain * s.rudder_angle - s.yaw_rate) / p.nomoto_time_constant + load.yaw};
}

VesselState advance(const VesselState& s, const Deriv& d, double h) {
    VesselState o = s;
    o.position += d.position * h;
    o.heading += d.heading * h;
    o.speed += d.speed * h;
    o.sway_velocity += d.sway * h;
    o.yaw_rate += d.yaw_rate * h;
    return o;
}

}  // namespace

VesselState step(const VesselState& state, const ActuatorCommand& cmd, const WaveLoad& load, double dt,
                 const VesselParams& params) {
    require(std::isfinite(dt) && dt > 0.0, ErrorCode::invalid_argument, "time step must be positive");
    VesselState s = state;
    const double rudder_cmd = std::clamp(cmd.rudder, -params.max_rudder, params.max_rudder);
    const double max_slew = params.rudder_rate_limit * dt;
    s.rudder_angle = std::clamp(s.rudder_angle + std::clamp(rudder_cmd - s.rudder_angle, -max_slew, max_slew),
                                -params.max_rudder, params.max_rudder);
    s.propeller_setting = std::clamp(cmd.propeller, 0.0, 1.0);
    const double target_speed = s.propeller_setting * params.max_speed;

    const Deriv k1 = derivative(s, target_speed, load, params);
    const VesselState mid = advance(s, k1, 0.5 * dt);
    const Deriv k2 = derivative(mid, target_speed, load, params);
    VesselState out = advance(s, k2, dt);
    out.heading = wrap_angle(out.heading);
    out.speed = std::max(0.0, out.speed);
    return out;
}

}  // namespace marvv
