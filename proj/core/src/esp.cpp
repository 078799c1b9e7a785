#include "iesp/esp.hpp"

#include <algorithm>
#include <cmath>

#include "iesp/errors.hpp"
#include "iesp/tyre.hpp"
#include "iesp/vec.hpp"

namespace iesp::esp {

using tyre::WheelPosition;

void IespParameters::validate() const {
    if (!(k_us >= 0.0) || !(k_ps >= 0.0))
        throw ConfigError("iesp: k_us and k_ps must be >= 0");
    if (!(mu_y_max > 0.0))
        throw ConfigError("iesp: mu_y_max must be positive");
    if (!(v_floor > 0.0) || !(tau_beta > 0.0))
        throw ConfigError("iesp: v_floor and tau_beta must be positive");
}

double reference_yaw_rate(double steer, double speed, double wheelbase, double k_us) {
    return std::tan(steer) / (wheelbase * (1.0 + k_us * speed * speed)) * speed;
}

double reference_slip_angle(double steer, double speed, double wheelbase, double gc_to_rear, double k_us,
                            double k_ps) {
    const double v2 = speed * speed;
    return std::tan(steer) / (wheelbase * (1.0 + k_us * v2)) * (gc_to_rear - k_ps * v2);
}

double yaw_rate_limit(double mu_y_max, double speed, double v_floor) {
    return mu_y_max * kGravity / std::max(speed, v_floor);
}

ReferenceState references(double steer, double speed, double wheelbase, double gc_to_rear,
                          const IespParameters& p) {
    ReferenceState r;
    r.yaw_rate_ref = reference_yaw_rate(steer, speed, wheelbase, p.k_us);
    r.slip_angle_ref = reference_slip_angle(steer, speed, wheelbase, gc_to_rear, p.k_us, p.k_ps);
    r.yaw_rate_limit = yaw_rate_limit(p.mu_y_max, speed, p.v_floor);
    return r;
}

double yaw_rate_target(double yaw_rate_ref, double limit) {
    const double magnitude = std::min(std::abs(yaw_rate_ref), limit);
    return yaw_rate_ref < 0.0 ? -magnitude : magnitude;
}

StabilityErrors compute_errors(double beta, double beta_ref, double yaw_rate, double yaw_rate_ref,
                               double limit) {
    StabilityErrors e;
    e.e_beta = beta - beta_ref;
    e.e_yaw_rate = yaw_rate - yaw_rate_target(yaw_rate_ref, limit);
    e.limit_excess = std::abs(yaw_rate_ref) - limit;
    return e;
}

SlipAngleEstimator::SlipAngleEstimator(double tau, double v_floor) : tau_(tau), v_floor_(v_floor) {
    if (!(tau_ > 0.0) || !(v_floor_ > 0.0))
        throw ConfigError("slip angle estimator: tau and v_floor must be positive");
}

void SlipAngleEstimator::reset(double beta) {
    estimate_ = beta;
    valid_ = true;
}

double SlipAngleEstimator::update(double a_lat, double yaw_rate, double speed, double leak_target, double dt) {
    if (!(dt > 0.0))
        throw ConfigError("slip angle estimator: dt must be positive");
    if (speed < v_floor_) {
        valid_ = false;
        return estimate_;
    }
    valid_ = true;
    const double drift = a_lat / speed - yaw_rate;
    // Exact solution over dt for inputs held constant.
    const double decay = std::exp(-dt / tau_);
    estimate_ = leak_target + (estimate_ - leak_target) * decay + drift * tau_ * (1.0 - decay);
    return estimate_;
}

YawDispense dispense(double delta_m_yaw, const std::array<double, 4>& loads, double wheel_radius,
                     double half_track_front, double half_track_rear) {
    YawDispense d;
    const double total = loads[0] + loads[1] + loads[2] + loads[3];
    if (!(total > 0.0)) {
        d.fault = true;
        return d;
    }
    d.front_moment = (loads[0] + loads[1]) / total * delta_m_yaw;
    d.rear_moment = delta_m_yaw - d.front_moment;
    d.front_brake = 2.0 * wheel_radius / half_track_front * d.front_moment;
    d.rear_brake = 2.0 * wheel_radius / half_track_rear * d.rear_moment;

    const auto fl = tyre::index(WheelPosition::FrontLeft);
    const auto fr = tyre::index(WheelPosition::FrontRight);
    const auto rl = tyre::index(WheelPosition::RearLeft);
    const auto rr = tyre::index(WheelPosition::RearRight);
    if (d.front_brake > 0.0)
        d.delta[fr] = d.front_brake;
    else if (d.front_brake < 0.0)
        d.delta[fl] = -d.front_brake;
    d.delta[rr] = 0.5 * d.rear_brake;
    d.delta[rl] = -0.5 * d.rear_brake;
    return d;
}

std::array<double, 4> brake_deltas(const YawDispense& d) {
    std::array<double, 4> out{};
    const auto fl = tyre::index(WheelPosition::FrontLeft);
    const auto fr = tyre::index(WheelPosition::FrontRight);
    const auto rl = tyre::index(WheelPosition::RearLeft);
    const auto rr = tyre::index(WheelPosition::RearRight);
    out[fl] = std::max(0.0, d.delta[fl]);
    out[fr] = std::max(0.0, d.delta[fr]);
    out[rr] = std::max(0.0, 2.0 * d.delta[rr]);
    out[rl] = std::max(0.0, 2.0 * d.delta[rl]);
    return out;
}

Iesp::Iesp(fuzzy::RuleBase yaw_moment_rules, fuzzy::RuleBase torque_cut_rules, IespParameters params,
           double wheelbase, double gc_to_rear, double wheel_radius, double half_track_front,
           double half_track_rear)
    : yaw_rules_(std::move(yaw_moment_rules)),
      cut_rules_(std::move(torque_cut_rules)),
      params_(params),
      wheelbase_(wheelbase),
      gc_to_rear_(gc_to_rear),
      wheel_radius_(wheel_radius),
      half_track_front_(half_track_front),
      half_track_rear_(half_track_rear),
      estimator_(params.tau_beta, params.v_floor) {
    params_.validate();
    if (yaw_rules_.inputs().size() != 2)
        throw ConfigError("iesp: yaw moment rule base needs two inputs (BetaErr, PsidotErr)");
    if (cut_rules_.inputs().size() != 1)
        throw ConfigError("iesp: torque cut rule base needs one input (Limit)");
}

double Iesp::corrective_yaw_moment(double e_beta, double e_yaw_rate) const {
    return yaw_rules_.evaluate(e_beta, e_yaw_rate);
}

double Iesp::torque_cut(double limit_excess) const {
    return std::clamp(cut_rules_.evaluate(limit_excess), 0.0, 100.0);
}

void Iesp::reset() {
    estimator_.reset();
}

IespOutput Iesp::tick(const IespInputs& in, double dt) {
    IespOutput out;
    out.reference = references(in.steer, in.speed, wheelbase_, gc_to_rear_, params_);
    out.slip_angle_estimate = estimator_.update(in.a_lat, in.yaw_rate, in.speed, out.reference.slip_angle_ref, dt);
    out.estimate_valid = estimator_.valid();
    out.errors = compute_errors(out.slip_angle_estimate, out.reference.slip_angle_ref, in.yaw_rate,
                                out.reference.yaw_rate_ref, out.reference.yaw_rate_limit);
    if (!out.estimate_valid)
        return out;

    out.delta_m_yaw = corrective_yaw_moment(out.errors.e_beta, out.errors.e_yaw_rate);
    out.torque_cut_percent = torque_cut(out.errors.limit_excess);
    out.dispense = dispense(out.delta_m_yaw, in.loads, wheel_radius_, half_track_front_, half_track_rear_);
    out.brake_delta = brake_deltas(out.dispense);
    return out;
}

}  // namespace iesp::esp
