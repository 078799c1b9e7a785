#pragma once

// Tyre-road contact for intact, deflated and deflating tyres.
//
// Slip conventions: sigma = (omega*r - v_long) / max(|v_long|, v_eps), so a
// locked wheel reads -1 and a driven wheel spinning up reads positive.
// alpha = atan2(v_lat, max(|v_long|, v_eps)) where v_lat is the contact
// patch velocity along the wheel's left axis. Friction coefficients carry
// the sign of the slip that produced them; tyre_force() turns them into
// forces that oppose the slip.

#include <array>
#include <string>
#include <string_view>

namespace iesp::tyre {

enum class WheelPosition { FrontLeft = 0, FrontRight = 1, RearLeft = 2, RearRight = 3 };

inline constexpr std::array<WheelPosition, 4> kWheels = {WheelPosition::FrontLeft, WheelPosition::FrontRight,
                                                         WheelPosition::RearLeft, WheelPosition::RearRight};

constexpr std::size_t index(WheelPosition w) {
    return static_cast<std::size_t>(w);
}
constexpr bool is_front(WheelPosition w) {
    return w == WheelPosition::FrontLeft || w == WheelPosition::FrontRight;
}
constexpr bool is_left(WheelPosition w) {
    return w == WheelPosition::FrontLeft || w == WheelPosition::RearLeft;
}

std::string_view to_string(WheelPosition w);
// Accepts "front_left", "front_right", "rear_left", "rear_right".
WheelPosition wheel_from_string(std::string_view name);

struct InflatedFrictionModel {
    double mu_long_max = 0.9;
    double mu_trasv_max = 0.9;
    // Slip at the longitudinal friction peak.
    double sigma_p = 0.15;
    // Slip angle at the transversal friction peak [rad] (7 deg).
    double alpha_p = 0.12217304763960307;
    // Fraction of the peak left when fully sliding (sigma = 1, alpha = 90 deg).
    double sliding_ratio = 0.75;
    // Curvature of the post-peak fall-off; larger drops faster past the peak.
    double falloff = 4.0;
    // Peak friction loss per unit of relative overload: the effective
    // coefficient is mu * (1 - load_sensitivity * (N / reference_load - 1)).
    double load_sensitivity = 0.15;
    double reference_load = 3700.0;

    // Throws ConfigError.
    void validate() const;

    // Pure-slip curves; arguments are magnitudes, results are >= 0.
    double mu_long_pure(double slip) const;
    double mu_trasv_pure(double slip_angle) const;

    double load_factor(double normal_load) const;
};

struct DeflatedFrictionModel {
    double mu_long_burst = 0.05;
    double mu_trasv_burst = 0.05;

    void validate() const;
};

struct Slip {
    double sigma = 0.0;
    double alpha = 0.0;
};

struct SlipOptions {
    double v_eps = 0.5;
    double sigma_cap = 1.0;
};

Slip compute_slip(double wheel_spin, double wheel_radius, double v_long, double v_lat, const SlipOptions& opt = {});

struct FrictionPair {
    double mu_long = 0.0;
    double mu_trasv = 0.0;
};

// Combined-slip friction. The operating point sits on the ellipse whose
// semi-axes are the pure-slip values mu_long_pure(|sigma|) and
// mu_trasv_pure(|alpha|); its angle comes from the peak-normalised slips.
// Past sigma_p the angle keeps turning toward the longitudinal axis, which
// saturates the transversal share.
FrictionPair friction_inflated(const InflatedFrictionModel& model, double sigma, double alpha);

// Residual of the ellipse relation for a friction pair at the given slip;
// zero on the ellipse, negative inside.
double ellipse_residual(const InflatedFrictionModel& model, double sigma, double alpha, const FrictionPair& mu);

// Elliptic polar: mu^2 = (mu_long*cos a)^2 + (mu_trasv*sin a)^2 where a is the
// direction of the contact patch velocity relative to the wheel plane.
double friction_deflated(const DeflatedFrictionModel& model, double slip_direction);

struct BurstEvent {
    WheelPosition wheel = WheelPosition::RearRight;
    double t_start = 0.0;
    double duration = 3.0;
    DeflatedFrictionModel target;

    void validate() const;
};

// 1 before the burst, 0 once deflation completes, linear in between.
double inflation_blend(const BurstEvent& event, double t);

struct TyreContactState {
    double sigma = 0.0;
    double alpha = 0.0;
    double normal_load = 0.0;
    double inflation_blend = 1.0;
    // Contact patch velocity in the wheel frame; orients the deflated force.
    double v_long = 0.0;
    double v_lat = 0.0;
    double f_long = 0.0;
    double f_trasv = 0.0;
};

struct ContactForce {
    double f_long = 0.0;
    double f_trasv = 0.0;
};

struct TyreModels {
    InflatedFrictionModel inflated;
    DeflatedFrictionModel deflated;
};

// Force on the vehicle in the wheel frame (longitudinal forward, transversal
// left). The intact contribution follows friction_inflated(); the deflated
// one has magnitude friction_deflated()*N and points against the contact
// patch velocity. The two are blended linearly by inflation_blend.
ContactForce tyre_force(const TyreContactState& contact, const TyreModels& models, double blend,
                        double v_eps = 0.5);

// The intact-tyre part alone (blend == 1).
ContactForce inflated_force(const TyreContactState& contact, const InflatedFrictionModel& model);
// The deflated-tyre part alone (blend == 0).
ContactForce deflated_force(const TyreContactState& contact, const DeflatedFrictionModel& model,
                            double v_eps = 0.5);

}  // namespace iesp::tyre
