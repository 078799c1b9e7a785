#pragma once

// Driver replacement: kinematic feed-forward steering from the path
// curvature plus a fuzzy feedback correction, summed and clamped.

#include <array>
#include <limits>

#include "iesp/fuzzy.hpp"

namespace iesp::pilot {

// One constant-curvature piece of the course. Curvature is signed,
// left-positive; zero means straight.
struct Bend {
    double length = 0.0;     // [m]
    double curvature = 0.0;  // [1/m]
};

struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // [rad]
};

struct PathSample {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double curvature = 0.0;
    // |1/curvature|; infinity on straights.
    double radius = std::numeric_limits<double>::infinity();
    // s was outside [0, total_length()] and was clamped.
    bool clamped = false;
};

struct Projection {
    double s = 0.0;
    double distance = 0.0;
    // Signed offset of the point from the path, left-positive [m].
    double lateral_offset = 0.0;
    double heading = 0.0;
    double curvature = 0.0;
};

// Four bends joined with continuous position and heading.
class Trajectory {
  public:
    Trajectory(Pose2 start, std::array<Bend, 4> bends);

    const Pose2& start() const { return start_; }
    const std::array<Bend, 4>& bends() const { return bends_; }
    double total_length() const { return ends_.back(); }

    PathSample evaluate(double s) const;

    // Nearest path point over the whole course.
    Projection project(double x, double y) const;
    // Nearest path point with s restricted to [s_min, s_max].
    Projection project(double x, double y, double s_min, double s_max) const;

  private:
    PathSample evaluate_in(std::size_t bend, double local_s) const;

    Pose2 start_;
    std::array<Bend, 4> bends_;
    std::array<Pose2, 4> starts_;
    std::array<double, 4> ends_;  // cumulative arc length at the end of each bend
};

struct TrackingError {
    double lateral_offset = 0.0;  // left-positive [m]
    double heading_error = 0.0;   // vehicle yaw minus path heading, wrapped [rad]
    double progress = 0.0;        // arc length s [m]
    double path_curvature = 0.0;
};

// delta = atan(l / rho) with the sign of the bend; curvature 0 gives 0.
double kinematic_steer(double wheelbase, double curvature);

double wrap_angle(double a);

struct AutopilotParameters {
    // Look-ahead used to fold the heading error into the offset input [s].
    double preview_time = 0.6;
    // Bound on the fuzzy correction [rad].
    double correction_limit = 0.1;
    // Road-wheel angle limit [rad].
    double max_steer = 0.6;
    // Window for the progress search around the previous progress [m].
    double search_back = 5.0;
    double search_ahead = 60.0;
};

struct PilotCommand {
    double steer = 0.0;
    double kinematic = 0.0;
    double correction = 0.0;
    bool end_of_course = false;
    TrackingError error;
};

class Autopilot {
  public:
    // The rule base maps (preview offset [m], yaw-rate error [rad/s]) to a
    // steering correction [rad].
    Autopilot(fuzzy::RuleBase rules, AutopilotParameters params, double wheelbase);

    const AutopilotParameters& params() const { return params_; }
    const fuzzy::RuleBase& rules() const { return rules_; }

    // Offset and heading error fold into a preview offset; yaw rate and speed
    // into the yaw-rate error against the path curvature. A vehicle left of
    // the path gets a negative (rightward) correction.
    double fuzzy_correction(const TrackingError& err, double yaw_rate, double speed) const;

    TrackingError track(const Trajectory& traj, double x, double y, double yaw);

    PilotCommand command(const Trajectory& traj, double x, double y, double yaw, double yaw_rate, double speed);

    void reset(double progress = 0.0);
    double progress() const { return progress_; }

  private:
    fuzzy::RuleBase rules_;
    AutopilotParameters params_;
    double wheelbase_;
    double progress_ = 0.0;
    double last_steer_ = 0.0;
};

}  // namespace iesp::pilot
