#include "iesp/plant.hpp"

#include <algorithm>
#include <cmath>

#include "iesp/errors.hpp"

namespace iesp::vehicle {

namespace {

// A deflated tyre wraps the rim and rolls kinematically; its spin relaxes to
// the ground speed with this time constant [s].
constexpr double kFlatRollTimeConstant = 0.05;
// Brake torque ramps in over this spin speed so a stopped wheel is held
// without chatter [rad/s].
constexpr double kBrakeSpinEps = 1.5;

}  // namespace

void ActuationSet::validate() const {
    if (!(throttle >= 0.0 && throttle <= 1.0))
        throw ConfigError("actuation: throttle outside [0, 1]");
    for (double b : brake_torque) {
        if (!(b >= 0.0))
            throw ConfigError("actuation: negative brake torque");
    }
    if (!(torque_cut_percent >= 0.0 && torque_cut_percent <= 100.0))
        throw ConfigError("actuation: torque cut outside [0, 100]");
}

double ActuationSet::engine_torque(const VehicleParameters& p) const {
    return throttle * p.engine_max_torque * (1.0 - torque_cut_percent / 100.0);
}

Plant::Plant(VehicleParameters params, TyreSetup tyres) : params_(params), tyres_(std::move(tyres)) {
    params_.validate();
    tyres_.intact.validate();
    if (tyres_.burst)
        tyres_.burst->validate();
}

double Plant::inflation(tyre::WheelPosition w, double t) const {
    if (!tyres_.burst || tyres_.burst->wheel != w)
        return 1.0;
    return tyre::inflation_blend(*tyres_.burst, t);
}

PlantOutputs Plant::evaluate(const VehicleState& state, const ActuationSet& u, double t) const {
    const auto& p = params_;
    VehicleState s = state;
    refresh_suspension(s, p);
    const auto normal = suspension_forces(s, p);

    const double wheel_drive = u.engine_torque(p) * p.drive_ratio / 2.0;
    const tyre::SlipOptions slip_opt{p.slip_v_eps, 1.0};

    AppliedLoads loads;
    PlantOutputs out;
    Vec3 horizontal;

    for (auto w : tyre::kWheels) {
        const auto i = tyre::index(w);
        const double steer = tyre::is_front(w) ? u.steer : 0.0;
        const double cs = std::cos(steer), sn = std::sin(steer);

        const Vec3 r = p.contact_point(w);
        const Vec3 v_point = s.velocity + cross(s.angular_rate, r);
        const double v_long = cs * v_point.x + sn * v_point.y;
        const double v_lat = -sn * v_point.x + cs * v_point.y;

        const double spin = s.wheel_spin[i];
        const auto kin = tyre::compute_slip(spin, p.wheel_radius, v_long, v_lat, slip_opt);

        tyre::TyreContactState c;
        c.sigma = std::clamp(s.tyre_slip[i], -1.0, slip_opt.sigma_cap);
        c.alpha = kin.alpha;
        c.normal_load = normal[i];
        c.inflation_blend = inflation(w, t);
        c.v_long = v_long;
        c.v_lat = v_lat;

        const double blend = c.inflation_blend;
        const auto intact = tyre::inflated_force(c, tyres_.intact);
        tyre::ContactForce flat;
        if (blend < 1.0) {
            flat = tyre::deflated_force(c, tyres_.burst->target, p.slip_v_eps);
        }
        c.f_long = blend * intact.f_long + (1.0 - blend) * flat.f_long;
        c.f_trasv = blend * intact.f_trasv + (1.0 - blend) * flat.f_trasv;

        const Vec3 f_body{cs * c.f_long - sn * c.f_trasv, sn * c.f_long + cs * c.f_trasv, 0.0};
        loads.contact_force[i] = f_body;
        horizontal += f_body;

        const bool driven = p.front_wheel_drive == tyre::is_front(w);
        const double drive = driven ? wheel_drive : 0.0;
        const double brake = u.brake_torque[i] * std::clamp(spin / kBrakeSpinEps, -1.0, 1.0);
        const double intact_spin_accel = (drive - brake - intact.f_long * p.wheel_radius) / p.wheel_inertia;
        const double flat_spin_accel = (v_long / p.wheel_radius - spin) / kFlatRollTimeConstant;
        loads.wheel_spin_accel[i] = blend * intact_spin_accel + (1.0 - blend) * flat_spin_accel;

        const double slip_speed = spin * p.wheel_radius - v_long;
        loads.tyre_slip_rate[i] =
            (slip_speed - std::max(std::abs(v_long), p.slip_v_eps) * s.tyre_slip[i]) / p.relaxation_length;

        out.wheels[i].contact = c;
        out.wheels[i].kinematic_slip = kin.sigma;
    }

    const double v_h = std::hypot(s.velocity.x, s.velocity.y);
    const double drag = 0.5 * p.air_density * p.drag_area * v_h;
    loads.force = {-drag * s.velocity.x, -drag * s.velocity.y, 0.0};
    horizontal += loads.force;

    out.derivative = derivatives(s, p, loads);
    out.accel_long = horizontal.x / p.mass;
    out.accel_lat = horizontal.y / p.mass;
    return out;
}

}  // namespace iesp::vehicle
