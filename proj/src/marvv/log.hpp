#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "marvv/autonomy.hpp"
#include "marvv/dynamics.hpp"

namespace marvv {

inline constexpr int kLogSchemaVersion = 1;

struct TargetTickRecord {
    // truth
    Vec2 position;
    double heading = 0.0;
    double speed = 0.0;
    // radar, NaN when there was no detection this tick
    bool detected = false;
    double range = std::nan("");
    double bearing = std::nan("");
    Vec2 measured_position{std::nan(""), std::nan("")};
    Vec2 measured_velocity{std::nan(""), std::nan("")};
    double snr_db = std::nan("");
    double sigma_range = std::nan("");
    double sigma_velocity = std::nan("");
    // fusion, NaN until the target has been seen
    bool has_estimate = false;
    Vec2 estimated_position{std::nan(""), std::nan("")};
    Vec2 estimated_velocity{std::nan(""), std::nan("")};
    // assessment
    double dcpa = std::nan("");
    double tcpa = std::nan("");
    bool flagged = false;
};

struct TickRecord {
    std::size_t tick = 0;
    double time = 0.0;
    std::string pipeline;  // stage letters in execution order, '-' for a skipped stage
    VesselState ego;
    double desired_heading = 0.0;
    double desired_speed = 0.0;
    ActuatorCommand command;
    double cross_track = 0.0;
    double depth = 0.0;
    bool grounded = false;
    bool scan = false;
    bool trigger_raw = false;
    bool trigger = false;
    PlannerKind planner = PlannerKind::global;
    std::uint64_t plan_id = 0;
    bool plan_feasible = true;
    std::size_t active_waypoint = 1;
    std::vector<TargetTickRecord> targets;  // same order as LogHeader::target_ids
};

struct LogHeader {
    int schema_version = kLogSchemaVersion;
    std::string build_version;
    std::string scenario_json;  // canonical, seed included
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    double dt = 0.0;
    double duration = 0.0;
    double safety_radius = 0.0;
    std::vector<std::string> target_ids;
};

struct SimulationLog {
    LogHeader header;
    std::vector<TickRecord> ticks;
};

/// Column names of the CSV body for the given target ids.
std::vector<std::string> log_columns(const std::vector<std::string>& target_ids);

std::string log_to_csv(const SimulationLog& log);
std::string log_header_to_json(const LogHeader& header);

/// Writes `<path>` (CSV body) and the sidecar returned by log_header_path(path).
void write_log(const SimulationLog& log, const std::filesystem::path& csv_path);

/// `log.csv` -> `log.header.json`.
std::filesystem::path log_header_path(const std::filesystem::path& csv_path);

/// Reads a log written by write_log; the header sidecar must sit next to it.
SimulationLog read_log(const std::filesystem::path& csv_path);
SimulationLog parse_log(const std::string& csv_text, const std::string& header_json);

}  // namespace marvv
