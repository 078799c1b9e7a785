#include "iesp/tyre.hpp"

#include <algorithm>
#include <cmath>

#include "iesp/errors.hpp"
#include "iesp/vec.hpp"

namespace iesp::tyre {

std::string_view to_string(WheelPosition w) {
    switch (w) {
        case WheelPosition::FrontLeft:
            return "front_left";
        case WheelPosition::FrontRight:
            return "front_right";
        case WheelPosition::RearLeft:
            return "rear_left";
        case WheelPosition::RearRight:
            return "rear_right";
    }
    return "unknown";
}

WheelPosition wheel_from_string(std::string_view name) {
    for (auto w : kWheels) {
        if (to_string(w) == name)
            return w;
    }
    throw ConfigError("unknown wheel '" + std::string(name) + "'");
}

void InflatedFrictionModel::validate() const {
    if (!(mu_long_max > 0.0) || !(mu_trasv_max > 0.0))
        throw ConfigError("inflated tyre: friction maxima must be positive");
    if (!(sigma_p > 0.0 && sigma_p < 1.0))
        throw ConfigError("inflated tyre: sigma_p must lie in (0, 1)");
    if (!(alpha_p > 0.0 && alpha_p < kPi / 2))
        throw ConfigError("inflated tyre: alpha_p must lie in (0, pi/2)");
    if (!(sliding_ratio > 0.0 && sliding_ratio <= 1.0))
        throw ConfigError("inflated tyre: sliding_ratio must lie in (0, 1]");
    if (!(falloff >= 0.0))
        throw ConfigError("inflated tyre: falloff must be >= 0");
    if (!(load_sensitivity >= 0.0 && load_sensitivity < 1.0))
        throw ConfigError("inflated tyre: load_sensitivity must lie in [0, 1)");
    if (!(reference_load > 0.0))
        throw ConfigError("inflated tyre: reference_load must be positive");
}

namespace {

// Rises as 2x/(1+x^2) to the peak (zero slope there), then falls rationally
// to sliding_ratio*peak at the end of the range and stays there.
double peaked_curve(double s, double s_peak, double s_end, double peak, double sliding_ratio, double falloff) {
    if (s <= s_peak) {
        const double x = s / s_peak;
        return peak * 2.0 * x / (1.0 + x * x);
    }
    const double y = std::min(1.0, (s - s_peak) / (s_end - s_peak));
    const double r = (1.0 - y) / (1.0 + falloff * y);
    return peak * (sliding_ratio + (1.0 - sliding_ratio) * r);
}

double sign_of(double v) {
    return v < 0.0 ? -1.0 : 1.0;
}

}  // namespace

double InflatedFrictionModel::mu_long_pure(double slip) const {
    return peaked_curve(std::abs(slip), sigma_p, 1.0, mu_long_max, sliding_ratio, falloff);
}

double InflatedFrictionModel::mu_trasv_pure(double slip_angle) const {
    return peaked_curve(std::abs(slip_angle), alpha_p, kPi / 2, mu_trasv_max, sliding_ratio, falloff);
}

double InflatedFrictionModel::load_factor(double normal_load) const {
    return std::max(0.0, 1.0 - load_sensitivity * (normal_load / reference_load - 1.0));
}

void DeflatedFrictionModel::validate() const {
    if (!(mu_long_burst > 0.0 && mu_long_burst <= 1.0) || !(mu_trasv_burst > 0.0 && mu_trasv_burst <= 1.0))
        throw ConfigError("deflated tyre: semi-axes must lie in (0, 1]");
}

Slip compute_slip(double wheel_spin, double wheel_radius, double v_long, double v_lat, const SlipOptions& opt) {
    const double denom = std::max(std::abs(v_long), opt.v_eps);
    Slip s;
    s.sigma = std::clamp((wheel_spin * wheel_radius - v_long) / denom, -1.0, opt.sigma_cap);
    s.alpha = std::atan2(v_lat, denom);
    return s;
}

FrictionPair friction_inflated(const InflatedFrictionModel& model, double sigma, double alpha) {
    const double s = std::abs(sigma);
    const double a = std::abs(alpha);
    const double theta = std::atan2(a / model.alpha_p, s / model.sigma_p);
    FrictionPair mu;
    mu.mu_long = sign_of(sigma) * model.mu_long_pure(s) * std::cos(theta);
    mu.mu_trasv = sign_of(alpha) * model.mu_trasv_pure(a) * std::sin(theta);
    if (s == 0.0)
        mu.mu_long = 0.0;
    if (a == 0.0)
        mu.mu_trasv = 0.0;
    return mu;
}

double ellipse_residual(const InflatedFrictionModel& model, double sigma, double alpha, const FrictionPair& mu) {
    double sum = 0.0;
    const double long_axis = model.mu_long_pure(sigma);
    const double trasv_axis = model.mu_trasv_pure(alpha);
    if (long_axis > 0.0)
        sum += (mu.mu_long / long_axis) * (mu.mu_long / long_axis);
    if (trasv_axis > 0.0)
        sum += (mu.mu_trasv / trasv_axis) * (mu.mu_trasv / trasv_axis);
    return sum - 1.0;
}

double friction_deflated(const DeflatedFrictionModel& model, double slip_direction) {
    const double c = model.mu_long_burst * std::cos(slip_direction);
    const double s = model.mu_trasv_burst * std::sin(slip_direction);
    return std::sqrt(c * c + s * s);
}

void BurstEvent::validate() const {
    if (!(duration > 0.0))
        throw ConfigError("burst: duration must be positive");
    if (!(t_start >= 0.0))
        throw ConfigError("burst: start time must be >= 0");
    target.validate();
}

double inflation_blend(const BurstEvent& event, double t) {
    if (t <= event.t_start)
        return 1.0;
    if (t >= event.t_start + event.duration)
        return 0.0;
    return 1.0 - (t - event.t_start) / event.duration;
}

ContactForce inflated_force(const TyreContactState& contact, const InflatedFrictionModel& model) {
    if (!(contact.normal_load > 0.0))
        return {};
    const auto mu = friction_inflated(model, contact.sigma, contact.alpha);
    const double n = contact.normal_load * model.load_factor(contact.normal_load);
    // Positive alpha means the patch slides left, so the lateral force acts right.
    return {mu.mu_long * n, -mu.mu_trasv * n};
}

ContactForce deflated_force(const TyreContactState& contact, const DeflatedFrictionModel& model, double v_eps) {
    if (!(contact.normal_load > 0.0))
        return {};
    const double speed = std::hypot(contact.v_long, contact.v_lat);
    if (speed == 0.0)
        return {};
    const double direction = std::atan2(contact.v_lat, std::abs(contact.v_long));
    const double magnitude = friction_deflated(model, direction) * contact.normal_load;
    // Full magnitude above v_eps, proportional to speed below it.
    const double scale = magnitude / std::max(speed, v_eps);
    return {-scale * contact.v_long, -scale * contact.v_lat};
}

ContactForce tyre_force(const TyreContactState& contact, const TyreModels& models, double blend, double v_eps) {
    if (!(contact.normal_load > 0.0))
        return {};
    const double w = std::clamp(blend, 0.0, 1.0);
    ContactForce f;
    if (w > 0.0) {
        const auto intact = inflated_force(contact, models.inflated);
        f.f_long += w * intact.f_long;
        f.f_trasv += w * intact.f_trasv;
    }
    if (w < 1.0) {
        const auto flat = deflated_force(contact, models.deflated, v_eps);
        f.f_long += (1.0 - w) * flat.f_long;
        f.f_trasv += (1.0 - w) * flat.f_trasv;
    }
    return f;
}

}  // namespace iesp::tyre
