#pragma once

// Closed-loop run: plant at dt, autopilot / ABS / stability program at the
// controller period with zero-order hold, one trace sample per controller
// tick.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "iesp/autopilot.hpp"
#include "iesp/scenario.hpp"

namespace iesp::sim {

struct TraceSample {
    double t = 0.0;
    double x = 0.0, y = 0.0, z = 0.0;
    double yaw = 0.0, pitch = 0.0, roll = 0.0;
    double vx = 0.0, vy = 0.0, vz = 0.0;  // body frame
    double roll_rate = 0.0, pitch_rate = 0.0, yaw_rate = 0.0;
    double speed = 0.0;
    double accel_long = 0.0, accel_lat = 0.0;

    double steer = 0.0;
    double steer_kinematic = 0.0;
    double steer_correction = 0.0;
    double throttle = 0.0;
    double brake_pedal = 0.0;
    std::array<double, 4> brake_torque{};
    double delta_m_yaw = 0.0;
    double torque_cut = 0.0;

    double beta = 0.0;      // true slip angle, unwrapped [rad]
    double beta_est = 0.0;  // estimator output
    double beta_ref = 0.0;
    double yaw_rate_ref = 0.0;
    double yaw_rate_limit = 0.0;
    double e_beta = 0.0;
    double e_yaw_rate = 0.0;

    double progress = 0.0;
    double lateral_offset = 0.0;
    double track_error = 0.0;       // distance to the nearest path point [m]
    double track_error_mean = 0.0;  // cumulative mean of track_error [m]

    std::array<double, 4> wheel_spin{};
    std::array<double, 4> sigma{};
    std::array<double, 4> alpha{};
    std::array<double, 4> normal_load{};
    std::array<double, 4> inflation{};
};

// Fixed CSV column order; array fields expand to _fl, _fr, _rl, _rr.
const std::vector<std::string>& trace_columns();
std::vector<double> to_row(const TraceSample& s);
TraceSample from_row(const std::vector<double>& row);

struct SimTrace {
    double period = 0.0;
    std::vector<TraceSample> samples;
};

struct FaultRecord {
    double time = 0.0;
    std::string message;
};

struct RunResult {
    SimTrace trace;
    std::optional<FaultRecord> fault;
    bool end_of_course = false;
    bool stopped = false;  // braked to rest
};

RunResult run(const Scenario& scenario);

struct RunMetrics {
    double max_abs_beta_deg = 0.0;
    bool spin = false;  // |beta| went past 360 deg
    double max_track_error = 0.0;
    double max_track_error_mean = 0.0;
    double final_track_error_mean = 0.0;
    double max_abs_yaw_rate_error = 0.0;
    // Time |beta| first exceeded 360 deg; negative when it never did.
    double spin_time = -1.0;
};

// Errors are recomputed from the trace positions against the trajectory;
// progress along the course is tracked so a point is never matched to a
// different stretch of road that happens to lie close by.
RunMetrics compute_metrics(const SimTrace& trace, const pilot::Trajectory& trajectory);

// Nearest-point error tracker shared by run() and compute_metrics().
class TrackErrorMeter {
  public:
    explicit TrackErrorMeter(const pilot::Trajectory& trajectory);

    // Returns the instantaneous error and updates the running mean.
    double update(double x, double y);
    double mean() const { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }
    double progress() const { return progress_; }
    double lateral_offset() const { return offset_; }

  private:
    const pilot::Trajectory& trajectory_;
    double progress_ = 0.0;
    double offset_ = 0.0;
    double sum_ = 0.0;
    std::size_t count_ = 0;
};

pilot::Trajectory trajectory_of(const Scenario& scenario);

}  // namespace iesp::sim
