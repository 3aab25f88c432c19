#include "marvv/weather.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "marvv/error.hpp"
#include "marvv/geometry.hpp"

namespace marvv {

namespace {

// Generated at configure time from data/itu_r_p838_3.txt.
constexpr const char* kP838Table =
#include "itu_r_p838_3.inc"
    ;

struct P838Row {
    double freq_ghz;
    double k_h;
    double alpha_h;
    double k_v;
    double alpha_v;
};

std::vector<P838Row> parse_p838(const char* text) {
    std::vector<P838Row> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::istringstream ls(line);
        P838Row r{};
        if (!(ls >> r.freq_ghz >> r.k_h >> r.alpha_h >> r.k_v >> r.alpha_v)) {
            fail(ErrorCode::parse, "malformed P.838 coefficient row: " + line);
        }
        if (!rows.empty() && r.freq_ghz <= rows.back().freq_ghz) {
            fail(ErrorCode::parse, "P.838 coefficient table frequencies must increase");
        }
        rows.push_back(r);
    }
    return rows;
}

const std::vector<P838Row>& p838_table() {
    static const std::vector<P838Row> table = parse_p838(kP838Table);
    return table;
}

void check_finite_nonneg(double v, const char* name) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::invalid_argument,
            std::string(name) + " must be finite and non-negative");
}

}  // namespace

void validate(const WeatherSeverity& sev) {
    const std::array<std::pair<const char*, double>, 3> parts{{{"rain", sev.rain}, {"fog", sev.fog}, {"sea", sev.sea}}};
    for (const auto& [name, v] : parts) {
        if (!(v >= 0.0 && v <= 10.0)) {
            std::ostringstream os;
            os << "weather severity '" << name << "' = " << v << " is outside [0, 10]";
            fail(ErrorCode::validation, os.str());
        }
    }
}

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    require(!knots_.empty(), ErrorCode::validation, "piecewise-linear map needs at least one knot");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        require(knots_[i].first > knots_[i - 1].first, ErrorCode::validation,
                "piecewise-linear knots must have strictly increasing severity");
        require(knots_[i].second >= knots_[i - 1].second, ErrorCode::validation,
                "piecewise-linear map must be monotone nondecreasing");
    }
}

double PiecewiseLinear::operator()(double x) const {
    if (knots_.empty()) {
        return 0.0;
    }
    if (x <= knots_.front().first) {
        return knots_.front().second;
    }
    if (x >= knots_.back().first) {
        return knots_.back().second;
    }
    auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const auto& k) { return v < k.first; });
    auto lo = hi - 1;
    const double t = (x - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

PhysicalWeather severity_to_physical(const WeatherSeverity& sev, const SeverityMap& map) {
    validate(sev);
    PhysicalWeather w;
    w.rain_rate = std::clamp(map.rain_rate(sev.rain), 0.0, 100.0);
    w.liquid_water_content = std::max(0.0, map.liquid_water(sev.fog));
    w.significant_wave_height = std::max(0.0, map.wave_height(sev.sea));
    w.peak_period = map.peak_period(sev.sea);
    require(w.peak_period > 0.0, ErrorCode::validation, "severity map produced non-positive peak period");
    w.air_temperature = map.air_temperature;
    w.visibility = w.liquid_water_content > 0.0
                       ? std::min(map.max_visibility, 1000.0 / (w.liquid_water_content * map.visibility_coeff))
                       : map.max_visibility;
    return w;
}

std::pair<double, double> rain_coefficients(double frequency_hz, Polarization pol) {
    const auto& table = p838_table();
    const double f = frequency_hz * 1e-9;
    if (!(f >= table.front().freq_ghz && f <= table.back().freq_ghz)) {
        std::ostringstream os;
        os << "frequency " << f << " GHz is outside the P.838 coefficient table [" << table.front().freq_ghz
           << ", " << table.back().freq_ghz << "] GHz";
        fail(ErrorCode::out_of_bounds, os.str());
    }
    auto pick = [pol](const P838Row& r) {
        return pol == Polarization::horizontal ? std::pair{r.k_h, r.alpha_h} : std::pair{r.k_v, r.alpha_v};
    };
    auto hi = std::lower_bound(table.begin(), table.end(), f,
                               [](const P838Row& r, double v) { return r.freq_ghz < v; });
    if (hi->freq_ghz == f) {
        return pick(*hi);
    }
    auto lo = hi - 1;
    const auto [k0, a0] = pick(*lo);
    const auto [k1, a1] = pick(*hi);
    // log k and alpha both linear in log f.
    const double t = std::log(f / lo->freq_ghz) / std::log(hi->freq_ghz / lo->freq_ghz);
    return {std::exp(std::log(k0) + t * (std::log(k1) - std::log(k0))), a0 + t * (a1 - a0)};
}

double rain_specific_attenuation(double rain_rate_mmh, double frequency_hz, Polarization pol) {
    check_finite_nonneg(rain_rate_mmh, "rain rate");
    const auto [k, alpha] = rain_coefficients(frequency_hz, pol);
    if (rain_rate_mmh == 0.0) {
        return 0.0;
    }
    return k * std::pow(rain_rate_mmh, alpha);
}

double liquid_water_coefficient(double frequency_hz, double temperature_k) {
    const double f = frequency_hz * 1e-9;
    if (!(f >= 1.0 && f <= 100.0)) {
        std::ostringstream os;
        os << "frequency " << f << " GHz is outside the liquid-water model range [1, 100] GHz";
        fail(ErrorCode::out_of_bounds, os.str());
    }
    require(std::isfinite(temperature_k) && temperature_k > 0.0, ErrorCode::invalid_argument,
            "temperature must be positive");
    // Double-Debye permittivity of liquid water.
    const double theta = 300.0 / temperature_k;
    const double eps0 = 77.66 + 103.3 * (theta - 1.0);
    const double eps1 = 0.0671 * eps0;
    const double eps2 = 3.52;
    const double fp = 20.20 - 146.0 * (theta - 1.0) + 316.0 * (theta - 1.0) * (theta - 1.0);
    const double fs = 39.8 * fp;
    const double rp = f / fp;
    const double rs = f / fs;
    const double eps_im = f * (eps0 - eps1) / (fp * (1.0 + rp * rp)) + f * (eps1 - eps2) / (fs * (1.0 + rs * rs));
    const double eps_re = (eps0 - eps1) / (1.0 + rp * rp) + (eps1 - eps2) / (1.0 + rs * rs) + eps2;
    const double eta = (2.0 + eps_re) / eps_im;
    return 0.819 * f / (eps_im * (1.0 + eta * eta));
}

double fog_specific_attenuation(double lwc_gm3, double frequency_hz, double temperature_k) {
    check_finite_nonneg(lwc_gm3, "liquid water content");
    return liquid_water_coefficient(frequency_hz, temperature_k) * lwc_gm3;
}

AttenuationResult path_attenuation(double gamma_rain, double gamma_fog, double range_m, PathMode mode) {
    check_finite_nonneg(gamma_rain, "rain attenuation");
    check_finite_nonneg(gamma_fog, "fog attenuation");
    check_finite_nonneg(range_m, "range");
    const double d_km = (mode == PathMode::round_trip ? 2.0 : 1.0) * range_m / 1000.0;
    AttenuationResult r;
    r.gamma_rain = gamma_rain;
    r.gamma_fog = gamma_fog;
    r.path_loss = (gamma_rain + gamma_fog) * d_km;
    r.linear_loss = std::pow(10.0, r.path_loss / 10.0);
    return r;
}

void validate(const RadarConfig& cfg) {
    const std::array<std::pair<const char*, double>, 8> fields{{
        {"frequency", cfg.frequency},
        {"transmit_power", cfg.transmit_power},
        {"bandwidth", cfg.bandwidth},
        {"dwell_time", cfg.dwell_time},
        {"system_temperature", cfg.system_temperature},
        {"max_range", cfg.max_range},
        {"update_rate", cfg.update_rate},
        {"track_window", cfg.track_window},
    }};
    for (const auto& [name, v] : fields) {
        if (!(std::isfinite(v) && v > 0.0)) {
            fail(ErrorCode::validation, std::string("radar ") + name + " must be strictly positive");
        }
    }
    require(std::isfinite(cfg.antenna_gain_db), ErrorCode::validation, "radar antenna_gain_db must be finite");
    require(std::isfinite(cfg.noise_figure_db), ErrorCode::validation, "radar noise_figure_db must be finite");
}

RadarConfig radar_preset(std::string_view name) {
    RadarConfig cfg;
    if (name == "nominal") {
        return cfg;
    }
    if (name == "high") {
        cfg.transmit_power = 25e3;
        cfg.antenna_gain_db = 30.0;
        cfg.bandwidth = 28e6;
        cfg.dwell_time = 10e-3;
        return cfg;
    }
    if (name == "low") {
        cfg.transmit_power = 7e3;
        cfg.antenna_gain_db = 22.0;
        cfg.bandwidth = 10e6;
        cfg.dwell_time = 5e-3;
        return cfg;
    }
    fail(ErrorCode::invalid_argument, "unknown radar preset '" + std::string(name) + "' (expected high, nominal, low)");
}

double compute_snr_db(const RadarConfig& cfg, double range_m, double rcs_m2, const AttenuationResult& loss) {
    require(std::isfinite(range_m) && range_m > 0.0, ErrorCode::invalid_argument, "SNR range must be positive");
    require(std::isfinite(rcs_m2) && rcs_m2 > 0.0, ErrorCode::invalid_argument, "radar cross section must be positive");
    const double gain = std::pow(10.0, cfg.antenna_gain_db / 10.0);
    const double nf = std::pow(10.0, cfg.noise_figure_db / 10.0);
    const double lambda = cfg.wavelength();
    const double four_pi_cubed = std::pow(4.0 * kPi, 3);
    const double r4 = std::pow(range_m, 4);
    const double signal = cfg.transmit_power * gain * gain * lambda * lambda * rcs_m2;
    const double noise = four_pi_cubed * r4 * kBoltzmann * cfg.system_temperature * cfg.bandwidth * nf *
                         loss.linear_loss;
    return 10.0 * std::log10(signal / noise);
}

NoiseStds measurement_noise_stds(double snr_db, const RadarConfig& cfg) {
    require(std::isfinite(snr_db), ErrorCode::invalid_argument, "SNR must be finite");
    require(cfg.bandwidth > 0.0, ErrorCode::invalid_argument, "bandwidth must be positive");
    require(cfg.dwell_time > 0.0, ErrorCode::invalid_argument, "dwell time must be positive");
    const double root = std::sqrt(2.0 * std::pow(10.0, snr_db / 10.0));
    return {kSpeedOfLight / (2.0 * cfg.bandwidth * root), cfg.wavelength() / (2.0 * cfg.dwell_time * root)};
}

}  // namespace marvv
