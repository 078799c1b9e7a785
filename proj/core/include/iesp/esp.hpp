#pragma once

// Stability program: monotrack reference response, adherence limit, slip
// angle estimate, the two fuzzy controllers and the yaw moment dispenser.
//
// Sign conventions follow the vehicle module for beta and yaw rate (left
// turn positive). The corrective yaw moment is positive clockwise, i.e. in
// the direction produced by braking the right-hand wheels, so a positive
// front share brakes the front right wheel.

#include <array>

#include "iesp/fuzzy.hpp"

namespace iesp::esp {

struct IespParameters {
    double k_us = 0.002;   // understeer factor on the yaw-rate reference [s^2/m^2]
    double k_ps = 0.0005;  // understeer factor on the slip-angle reference [s^2/m^2]
    double mu_y_max = 0.9;
    double v_floor = 1.0;    // [m/s]
    double tau_beta = 0.3;   // estimator leak time constant [s]
    double dry_beta_limit = 0.20943951023931953;   // 12 deg
    double icy_beta_limit = 0.034906585039886591;  // 2 deg

    void validate() const;
};

// tan(delta) / (l * (1 + k_us V^2)) * V. With k_us = 0 this is V tan(delta) / l.
double reference_yaw_rate(double steer, double speed, double wheelbase, double k_us);

// tan(delta) / (l * (1 + k_us V^2)) * (b - k_ps V^2).
double reference_slip_angle(double steer, double speed, double wheelbase, double gc_to_rear, double k_us,
                            double k_ps);

// mu g / max(V, v_floor).
double yaw_rate_limit(double mu_y_max, double speed, double v_floor = 1.0);

struct ReferenceState {
    double yaw_rate_ref = 0.0;
    double slip_angle_ref = 0.0;
    double yaw_rate_limit = 0.0;
};

ReferenceState references(double steer, double speed, double wheelbase, double gc_to_rear,
                          const IespParameters& p);

// Target the controller actually tracks: the reference yaw rate with its
// magnitude capped at the adherence limit.
double yaw_rate_target(double yaw_rate_ref, double yaw_rate_limit);

struct StabilityErrors {
    double e_beta = 0.0;
    double e_yaw_rate = 0.0;
    // |psi_dot_ref| - psi_dot_limit; positive when the adherence limit is exceeded.
    double limit_excess = 0.0;
};

StabilityErrors compute_errors(double beta, double beta_ref, double yaw_rate, double yaw_rate_ref,
                               double yaw_rate_limit);

// Integrates d(beta)/dt = a_lat / V - psi_dot with a leak toward a model
// value. The stability program leaks toward the single-track steady-state
// slip angle, so in a steady turn the estimate settles on the reference and
// any sustained drift shows up as a departure from it.
class SlipAngleEstimator {
  public:
    SlipAngleEstimator(double tau, double v_floor);

    // Returns the updated estimate. Below v_floor the estimate is held and
    // valid() turns false.
    double update(double a_lat, double yaw_rate, double speed, double leak_target, double dt);

    double estimate() const { return estimate_; }
    bool valid() const { return valid_; }
    void reset(double beta = 0.0);

  private:
    double tau_;
    double v_floor_;
    double estimate_ = 0.0;
    bool valid_ = true;
};

struct YawDispense {
    double front_moment = 0.0;  // M_F
    double rear_moment = 0.0;   // M_R
    double front_brake = 0.0;   // Delta M_brake_F, on one front wheel
    double rear_brake = 0.0;    // Delta M_brake_R, split +/- over the rear pair
    // Requested brake deltas per wheel; rear entries carry opposite signs.
    std::array<double, 4> delta{};
    bool fault = false;  // zero total load
};

// Splits the moment by axle load (front/rear shares of the total) and turns
// each share into brake torque with 2 r_w / c. half_track_* are the
// half-widths of the axles.
YawDispense dispense(double delta_m_yaw, const std::array<double, 4>& loads, double wheel_radius,
                     double half_track_front, double half_track_rear);

// Realisable brake deltas: negative requests are dropped and the opposite
// wheel of the rear pair takes twice its share so the net moment survives.
std::array<double, 4> brake_deltas(const YawDispense& d);

struct IespOutput {
    ReferenceState reference;
    StabilityErrors errors;
    double slip_angle_estimate = 0.0;
    double delta_m_yaw = 0.0;
    double torque_cut_percent = 0.0;
    YawDispense dispense;
    std::array<double, 4> brake_delta{};
    bool estimate_valid = true;
};

struct IespInputs {
    double steer = 0.0;
    double speed = 0.0;
    double yaw_rate = 0.0;
    double a_lat = 0.0;
    std::array<double, 4> loads{};
};

class Iesp {
  public:
    Iesp(fuzzy::RuleBase yaw_moment_rules, fuzzy::RuleBase torque_cut_rules, IespParameters params,
         double wheelbase, double gc_to_rear, double wheel_radius, double half_track_front,
         double half_track_rear);

    const IespParameters& params() const { return params_; }
    const fuzzy::RuleBase& yaw_moment_rules() const { return yaw_rules_; }
    const fuzzy::RuleBase& torque_cut_rules() const { return cut_rules_; }

    double corrective_yaw_moment(double e_beta, double e_yaw_rate) const;
    // Percent in [0, 100].
    double torque_cut(double limit_excess) const;

    IespOutput tick(const IespInputs& in, double dt);

    void reset();

  private:
    fuzzy::RuleBase yaw_rules_;
    fuzzy::RuleBase cut_rules_;
    IespParameters params_;
    double wheelbase_;
    double gc_to_rear_;
    double wheel_radius_;
    double half_track_front_;
    double half_track_rear_;
    SlipAngleEstimator estimator_;
};

}  // namespace iesp::esp
