#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "marvv/bathymetry.hpp"
#include "marvv/dynamics.hpp"
#include "marvv/geometry.hpp"
#include "marvv/radar.hpp"

namespace marvv {

// ---------------------------------------------------------------- fusion

struct TargetEstimate {
    std::string target_id;
    Vec2 position;
    Vec2 velocity;
    double age = 0.0;  // s since the last incorporated measurement
    double source_snr_db = 0.0;
    double last_update = 0.0;
    double position_sigma = 0.0;  // m, from the feeding track
    double velocity_sigma = 0.0;  // m/s
};

struct AlphaBetaGains {
    double alpha = 0.3;
    double beta = 0.05;
};

void validate(const AlphaBetaGains& g);

/// One fusion tick. Previous estimates are predicted forward by `dt`; a track whose
/// newest sample is later than the estimate's last update corrects it. Unknown
/// targets are initialised from their track. Output is sorted by target id.
std::vector<TargetEstimate> fuse_tracks(std::span<const TargetEstimate> previous, std::span<const Track> tracks,
                                        double dt, AlphaBetaGains gains);

// ---------------------------------------------------------------- situational awareness

struct CpaResult {
    double dcpa = 0.0;
    double tcpa = 0.0;
};

CpaResult cpa(Vec2 ego_position, Vec2 ego_velocity, Vec2 target_position, Vec2 target_velocity);
inline CpaResult cpa(Vec2 ego_position, Vec2 ego_velocity, const TargetEstimate& tgt) {
    return cpa(ego_position, ego_velocity, tgt.position, tgt.velocity);
}

struct CollisionThresholds {
    double distance = 1000.0;  // D_th, m
    double time = 300.0;       // T_th, s
};

struct TargetRisk {
    std::string target_id;
    double dcpa = 0.0;
    double tcpa = 0.0;
    bool flagged = false;
};

struct CollisionAssessment {
    std::vector<TargetRisk> targets;
    bool trigger = false;
    double timestamp = 0.0;
};

CollisionAssessment assess(std::span<const TargetEstimate> estimates, Vec2 ego_position, Vec2 ego_velocity,
                           const CollisionThresholds& thresholds, double timestamp);

/// Optional release delay on the trigger; off by default so raw flag flicker stays visible.
class TriggerLatch {
public:
    explicit TriggerLatch(double release_delay = 0.0) : release_delay_(release_delay) {}
    bool update(bool raw, double t);

private:
    double release_delay_;
    bool state_ = false;
    double last_raw_true_ = -1e300;
};

// ---------------------------------------------------------------- planning

enum class PlannerKind { global, cdca };

struct PlanResult {
    std::vector<Vec2> waypoints;
    PlannerKind planner_kind = PlannerKind::global;
    bool feasible = false;
    double grid_path_length = 0.0;  // length of the unsmoothed 8-connected cell path, m
};

/// 8-connected A* (no corner cutting) with string-pulling smoothing.
PlanResult plan_global(const OccupancyGrid& occ, Vec2 start, Vec2 goal);

double path_length(std::span<const Vec2> pts);

struct VelocityObstacle {
    Vec2 center;
    Vec2 velocity;
    double combined_radius = 0.0;
};

/// True iff the relative velocity lies in the collision cone and the disc is entered
/// within `horizon` seconds.
bool in_velocity_obstacle(Vec2 ego_position, Vec2 candidate_velocity, const VelocityObstacle& obstacle, double horizon);

struct CdcaParams {
    double heading_span = deg2rad(90.0);
    double heading_step = deg2rad(5.0);
    std::vector<double> speed_factors{1.0, 0.75, 0.5};
    double safety_radius = 350.0;  // m
    double clearance_margin = 150.0;  // m added to the VO radius for turn lag
    double uncertainty_gain = 1.0;    // VO radius grows by this many predicted position sigmas at CPA
    double horizon = 600.0;        // s
    double lead_time = 60.0;       // s along the avoidance course before the rejoin leg
    double rejoin_ahead = 1000.0;  // m past the ego's projection on the global path
};

inline double vo_radius(const CdcaParams& p) { return p.safety_radius + p.clearance_margin; }

/// VO radius for one target and candidate velocity, widened by the target's predicted
/// position uncertainty at the time of closest approach (capped at the horizon).
double vo_radius(const CdcaParams& p, const TargetEstimate& e, Vec2 ego_position, Vec2 candidate_velocity);

struct CdcaCandidate {
    double heading = 0.0;
    double speed = 0.0;
    double deviation = 0.0;  // heading - reference course, positive = starboard
};

struct CdcaResult {
    PlanResult plan;
    CdcaCandidate chosen;
};

/// Everything cdca_replan needs besides the world: the course and speed the global
/// plan would command now, and the global path to rejoin.
struct CdcaReference {
    double course = 0.0;
    double cruise_speed = 10.0;
    std::span<const Vec2> global_path;
};

/// All candidates in evaluation order (span x speed grid around the reference course).
std::vector<CdcaCandidate> cdca_candidates(const CdcaParams& params, const CdcaReference& ref);

/// Whether a candidate is admissible: outside every target's velocity obstacle and its
/// straight-line projection over the horizon stays on navigable cells.
bool cdca_admissible(const CdcaCandidate& c, const VesselState& ego, std::span<const TargetEstimate> estimates,
                     const OccupancyGrid& occ, const CdcaParams& params);

CdcaResult cdca_replan(const VesselState& ego, std::span<const TargetEstimate> estimates, const OccupancyGrid& occ,
                       const CdcaParams& params, const CdcaReference& ref);

// ---------------------------------------------------------------- guidance and control

struct GuidanceParams {
    double lookahead = 500.0;     // m
    double accept_radius = 200.0; // m
};

struct GuidanceOutput {
    double heading = 0.0;
    double speed = 0.0;
    std::size_t active = 1;  // index of the waypoint currently steered to
    double cross_track = 0.0;  // m, positive = ego to starboard of the path
    double path_course = 0.0;  // bearing of the active segment
};

/// Line-of-sight guidance on the polyline. `active` is the waypoint index carried
/// over from the previous tick (1 for a fresh plan).
GuidanceOutput guide(std::span<const Vec2> waypoints, std::size_t active, const VesselState& ego,
                     const GuidanceParams& params, double commanded_speed);

struct ControllerGains {
    double heading_kp = 3.2;
    double heading_ki = 0.01;
    double heading_kd = 55.0;
    double speed_kp = 0.1;
    double speed_ki = 0.002;
};

struct ControllerState {
    double heading_integral = 0.0;
    double speed_integral = 0.0;
};

struct ControlOutput {
    ActuatorCommand command;
    ControllerState state;
};

/// Heading PID to rudder and speed PI (with feed-forward) to propeller, both with
/// clamped-integration anti-windup.
ControlOutput control_step(double desired_heading, double desired_speed, const VesselState& vessel,
                           const ControllerGains& gains, const ControllerState& ctrl, double dt,
                           const VesselParams& params);

}  // namespace marvv
