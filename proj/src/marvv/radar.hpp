#pragma once

#include <deque>
#include <span>
#include <string>
#include <vector>

#include "marvv/geometry.hpp"
#include "marvv/rng.hpp"
#include "marvv/weather.hpp"

namespace marvv {

enum class ObstacleKind { vessel, terrain, infrastructure };

/// Convex plan-view footprint of something that can block the radar.
class ObstacleShape {
public:
    /// Throws validation error unless the polygon is convex, simple and has >= 3 vertices.
    ObstacleShape(std::string id, std::vector<Vec2> footprint, ObstacleKind kind);

    const std::string& id() const { return id_; }
    const std::vector<Vec2>& footprint() const { return footprint_; }
    ObstacleKind kind() const { return kind_; }

    bool contains(Vec2 p) const;
    bool intersects_segment(Vec2 a, Vec2 b) const;

private:
    std::string id_;
    std::vector<Vec2> footprint_;  // counter-clockwise
    ObstacleKind kind_;
};

/// Rectangular hull centred on the vessel reference point.
ObstacleShape vessel_footprint(const std::string& id, Vec2 center, double heading, double length, double beam);

/// True iff the segment origin->target crosses no occluder (shapes whose id equals
/// `exclude_id` are ignored, so a target's own hull does not hide it).
bool line_of_sight(Vec2 origin, Vec2 target, std::span<const ObstacleShape> occluders,
                   std::string_view exclude_id = {});

struct TargetTruth {
    std::string id;
    Vec2 position;
    Vec2 velocity;
    double heading = 0.0;
    double length = 175.0;
    double beam = 25.4;
    double rcs = 1000.0;  // m^2
};

struct Detection {
    std::string target_id;
    double range = 0.0;    // m, from the measured position, capped at max_range
    double bearing = 0.0;  // rad, relative to ego heading, (-pi, pi]
    Vec2 measured_position;
    Vec2 measured_velocity;
    double snr_db = 0.0;
    double sigma_range = 0.0;
    double sigma_velocity = 0.0;
    double timestamp = 0.0;
};

struct RadarPose {
    Vec2 position;
    double heading = 0.0;
};

/// One radar update. Targets beyond max_range or without line of sight produce
/// nothing; every other target gets isotropic Gaussian position/velocity noise
/// whose spread follows the weather-attenuated SNR.
std::vector<Detection> scan(std::span<const TargetTruth> targets, std::span<const ObstacleShape> static_occluders,
                            const RadarPose& ego, const RadarConfig& cfg, const PhysicalWeather& weather,
                            CounterRng& rng, double timestamp);

struct TrackSample {
    double t = 0.0;
    Vec2 position;
};

struct Track {
    std::string target_id;
    std::deque<TrackSample> history;
    Vec2 velocity_estimate;
    Vec2 last_measured_velocity;
    double last_snr_db = 0.0;
    double position_sigma = 0.0;  // m, of the newest sample
    double velocity_sigma = 0.0;  // m/s, of velocity_estimate
};

/// Appends the detection, evicts samples older than `window` seconds and refits the
/// velocity as the least-squares slope of position against time.
Track update_track(Track track, const Detection& det, double window);

/// Least-squares slope of position vs. time; needs >= 2 samples with distinct times.
Vec2 window_velocity(const std::deque<TrackSample>& history);

/// Sum of squared time offsets from the mean; the slope's variance is sigma^2 / this.
double window_time_spread(const std::deque<TrackSample>& history);

}  // namespace marvv
