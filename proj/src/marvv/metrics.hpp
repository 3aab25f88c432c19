#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "marvv/log.hpp"

namespace marvv {

inline constexpr double kKnotsPerMps = 3600.0 / 1852.0;

struct PIReport {
    std::vector<std::pair<std::string, double>> mpd_per_target;  // header target order
    double rmse_speed = 0.0;    // m/s
    double rmse_heading = 0.0;  // deg
    std::size_t trigger_transitions = 0;
    // Rising edges seen before the first run of `sustain_time` seconds of continuous
    // activation; equals trigger_transitions if no such run exists.
    std::size_t transitions_before_sustained = 0;
    double sustained_onset = std::nan("");  // s, NaN if never sustained
    bool grounded = false;
    std::size_t tick_count = 0;
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;

    double rmse_speed_knots() const { return rmse_speed * kKnotsPerMps; }
    double mpd(const std::string& target_id) const;
};

inline constexpr double kDefaultSustainTime = 10.0;  // s

/// Rejects an empty log or one with gaps in the time grid.
PIReport compute_pis(const SimulationLog& log, double sustain_time = kDefaultSustainTime);

/// Counts rising edges of the trigger before the first sustained activation.
std::pair<std::size_t, double> transitions_before_sustained(const std::vector<double>& times,
                                                            const std::vector<bool>& trigger, double sustain_time);

std::string report_to_json(const PIReport& r);

/// log.csv + log.header.json, report.json, trajectory_<vessel>.csv, timeseries.csv,
/// trigger.csv and estimates_<target>.csv.
void export_artifacts(const SimulationLog& log, const PIReport& report, const std::filesystem::path& out_dir);

}  // namespace marvv
