#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "marvv/autonomy.hpp"
#include "marvv/bathymetry.hpp"
#include "marvv/dynamics.hpp"
#include "marvv/radar.hpp"
#include "marvv/weather.hpp"

namespace marvv {

inline constexpr int kScenarioSchemaVersion = 1;

/// Lat/lon box converted to a local equirectangular metre frame centred on the box.
struct GeoBounds {
    double lat_min = 0.0;
    double lat_max = 0.0;
    double lon_min = 0.0;
    double lon_max = 0.0;

    Vec2 to_local(double lat, double lon) const;
    Vec2 local_min() const { return to_local(lat_min, lon_min); }
    Vec2 local_max() const { return to_local(lat_max, lon_max); }
    bool contains_local(Vec2 p) const;
};

struct BathymetrySource {
    enum class Kind { flat, raster };
    Kind kind = Kind::flat;
    double flat_depth = 40.0;    // m, for Kind::flat
    double cell_size = 100.0;    // m, for Kind::flat
    std::string path;            // for Kind::raster; relative paths resolve against the scenario file
    RasterFormat format = RasterFormat::ascii_grid;
};

struct TargetSpec {
    std::string id;
    Vec2 position;
    double heading = 0.0;  // rad
    double speed = 0.0;
    std::vector<Vec2> waypoints;  // optional open-loop route, followed at constant speed
    double rcs = 1000.0;
    double length = 175.0;
    double beam = 25.4;
};

struct EgoSpec {
    VesselParams params;
    VesselState initial;
    Vec2 goal;
    double cruise_speed = 10.0;
};

struct AutonomyConfig {
    AlphaBetaGains fusion;
    CollisionThresholds thresholds;
    double trigger_release_delay = 0.0;  // s; 0 = raw triggering
    CdcaParams cdca;
    GuidanceParams guidance;
    ControllerGains control;
    UkcPolicy ukc;
};

struct Scenario {
    std::string name = "unnamed";
    GeoBounds area;
    BathymetrySource bathymetry;
    WeatherSeverity weather;
    SeverityMap severity_map;
    std::string radar_preset = "nominal";
    RadarConfig radar;
    EgoSpec ego;
    std::vector<TargetSpec> targets;
    std::vector<ObstacleShape> obstacles;
    SeaStateOptions sea;
    AutonomyConfig autonomy;
    double duration = 600.0;  // s
    double dt = 0.05;         // s
    std::uint64_t seed = 1;
    std::filesystem::path base_dir;  // where relative raster paths resolve; not serialised
};

/// Throws validation error on any broken invariant.
void validate(const Scenario& s);

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir = {});

/// Canonical JSON with every default spelled out (keys sorted).
std::string scenario_to_json(const Scenario& s, bool include_seed = true);

/// FNV-1a 64 over the canonical JSON without the seed.
std::uint64_t scenario_hash(const Scenario& s);

/// The head-on plus crossing encounter off the Port of Los Angeles.
Scenario build_reference_scenario();

/// ideal (0,0,0), moderate (5,5,5), severe (10,10,10).
WeatherSeverity weather_preset(std::string_view name);

}  // namespace marvv
