#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace marvv {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kBoltzmann = 1.380649e-23;

/// Rain, fog, and sea-state severity, each on a 0..10 scale.
struct WeatherSeverity {
    double rain = 0.0;
    double fog = 0.0;
    double sea = 0.0;
};

/// Throws validation error naming the offending component if any is outside [0, 10].
void validate(const WeatherSeverity& sev);

/// Monotone piecewise-linear function over severity; flat beyond the end knots.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    /// Knots must have strictly increasing x and nondecreasing y.
    explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);

    double operator()(double x) const;
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_;
};

struct SeverityMap {
    PiecewiseLinear rain_rate{{{0.0, 0.0}, {10.0, 100.0}}};      // mm/h
    PiecewiseLinear liquid_water{{{0.0, 0.0}, {10.0, 0.5}}};     // g/m^3
    PiecewiseLinear wave_height{{{0.0, 0.5}, {10.0, 1.5}}};      // m
    PiecewiseLinear peak_period{{{0.0, 4.0}, {10.0, 7.0}}};      // s
    double visibility_coeff = 50.0;   // visibility = 1000 / (lwc * coeff) m
    double max_visibility = 50000.0;  // m, used when lwc -> 0
    double air_temperature = 293.15;  // K
};

struct PhysicalWeather {
    double rain_rate = 0.0;             // mm/h
    double liquid_water_content = 0.0;  // g/m^3
    double visibility = 50000.0;        // m
    double significant_wave_height = 0.5;
    double peak_period = 4.0;
    double air_temperature = 293.15;
};

PhysicalWeather severity_to_physical(const WeatherSeverity& sev, const SeverityMap& map = {});

enum class Polarization { horizontal, vertical };

/// Whether the weather path length is the one-way range or the monostatic round trip.
enum class PathMode { round_trip, one_way };

/// Rain specific attenuation gamma_r = k(f) R^alpha(f) in dB/km (ITU-R P.838-3).
double rain_specific_attenuation(double rain_rate_mmh, double frequency_hz, Polarization pol);

/// (k, alpha) for the given frequency, interpolated from the shipped coefficient table.
std::pair<double, double> rain_coefficients(double frequency_hz, Polarization pol);

/// Liquid-water specific attenuation coefficient K_l in (dB/km)/(g/m^3) (ITU-R P.840).
double liquid_water_coefficient(double frequency_hz, double temperature_k);

/// Fog/cloud specific attenuation gamma_f = K_l(f, T) M in dB/km.
double fog_specific_attenuation(double lwc_gm3, double frequency_hz, double temperature_k = 293.15);

struct AttenuationResult {
    double gamma_rain = 0.0;   // dB/km
    double gamma_fog = 0.0;    // dB/km
    double path_loss = 0.0;    // dB
    double linear_loss = 1.0;  // 10^(path_loss/10)
};

AttenuationResult path_attenuation(double gamma_rain, double gamma_fog, double range_m,
                                   PathMode mode = PathMode::round_trip);

struct RadarConfig {
    double frequency = 9.4e9;         // Hz
    double transmit_power = 10e3;     // W
    double antenna_gain_db = 26.0;
    double bandwidth = 20e6;          // Hz
    double dwell_time = 8e-3;         // s
    double noise_figure_db = 5.0;
    double system_temperature = 290.0;  // K
    double max_range = 12000.0;       // m
    double update_rate = 1.0;         // Hz
    double track_window = 10.0;       // s
    Polarization polarization = Polarization::horizontal;
    PathMode path_mode = PathMode::round_trip;
    std::optional<double> snr_floor_db;  // disabled: every gated target is detected

    double wavelength() const { return kSpeedOfLight / frequency; }
};

void validate(const RadarConfig& cfg);

/// Named configurations: "high", "nominal", "low".
RadarConfig radar_preset(std::string_view name);

/// Monostatic radar equation, returned in dB.
double compute_snr_db(const RadarConfig& cfg, double range_m, double rcs_m2, const AttenuationResult& loss);

struct NoiseStds {
    double range = 0.0;     // sigma_R, m
    double velocity = 0.0;  // sigma_v, m/s
};

NoiseStds measurement_noise_stds(double snr_db, const RadarConfig& cfg);

}  // namespace marvv
