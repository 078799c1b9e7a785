#include "iesp/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iesp/errors.hpp"

namespace iesp::vehicle {

void VehicleParameters::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string("vehicle: ") + name + " must be positive");
    };
    positive(mass, "mass");
    positive(wheelbase, "wheelbase");
    positive(gc_to_rear, "gc_to_rear");
    positive(gc_height, "gc_height");
    positive(track_front, "track_front");
    positive(track_rear, "track_rear");
    positive(wheel_radius, "wheel_radius");
    positive(inertia.x, "roll inertia");
    positive(inertia.y, "pitch inertia");
    positive(inertia.z, "yaw inertia");
    positive(wheel_inertia, "wheel_inertia");
    positive(spring_front, "spring_front");
    positive(spring_rear, "spring_rear");
    positive(damper_front, "damper_front");
    positive(damper_rear, "damper_rear");
    positive(roll_stiffness_front, "roll_stiffness_front");
    positive(roll_stiffness_rear, "roll_stiffness_rear");
    positive(suspension_travel, "suspension_travel");
    positive(bump_stop_stiffness, "bump_stop_stiffness");
    positive(drag_area, "drag_area");
    positive(air_density, "air_density");
    positive(engine_max_torque, "engine_max_torque");
    positive(drive_ratio, "drive_ratio");
    positive(brake_max_torque, "brake_max_torque");
    positive(max_steer, "max_steer");
    positive(relaxation_length, "relaxation_length");
    positive(slip_v_eps, "slip_v_eps");
    if (!(gc_to_rear < wheelbase))
        throw ConfigError("vehicle: gc_to_rear must be below the wheelbase");
    if (anti_roll_bar(true) < 0.0 || anti_roll_bar(false) < 0.0)
        throw ConfigError("vehicle: roll stiffness below what the corner springs already provide");
}

double VehicleParameters::half_track(WheelPosition w) const {
    return 0.5 * (tyre::is_front(w) ? track_front : track_rear);
}

Vec3 VehicleParameters::corner(WheelPosition w) const {
    const double x = tyre::is_front(w) ? gc_to_front() : -gc_to_rear;
    const double y = tyre::is_left(w) ? half_track(w) : -half_track(w);
    return {x, y, 0.0};
}

Vec3 VehicleParameters::contact_point(WheelPosition w) const {
    Vec3 c = corner(w);
    c.z = -gc_height;
    return c;
}

double VehicleParameters::static_load(WheelPosition w) const {
    const double axle = tyre::is_front(w) ? gc_to_rear / wheelbase : gc_to_front() / wheelbase;
    return 0.5 * mass * kGravity * axle;
}

double VehicleParameters::spring(WheelPosition w) const {
    return tyre::is_front(w) ? spring_front : spring_rear;
}

double VehicleParameters::damper(WheelPosition w) const {
    return tyre::is_front(w) ? damper_front : damper_rear;
}

double VehicleParameters::anti_roll_bar(bool front) const {
    const double track = front ? track_front : track_rear;
    const double k = front ? spring_front : spring_rear;
    const double total = front ? roll_stiffness_front : roll_stiffness_rear;
    return total - 0.5 * k * track * track;
}

double longitudinal_transfer(const VehicleParameters& p, double a_long) {
    return p.mass * a_long * p.gc_height / p.wheelbase;
}

std::array<double, 2> roll_transfer(const VehicleParameters& p, double a_trasv) {
    const double total = p.mass / p.mean_track() * p.gc_height * a_trasv;
    const double rear = total / (1.0 + p.roll_stiffness_front / p.roll_stiffness_rear);
    return {total - rear, rear};
}

WheelLoads vertical_loads(const VehicleParameters& p, double a_long, double a_trasv) {
    // The axle transfer is shared by the two wheels of the axle.
    const double dv = 0.5 * longitudinal_transfer(p, a_long);
    const auto [roll_f, roll_r] = roll_transfer(p, a_trasv);
    const double front = p.static_load(WheelPosition::FrontLeft);
    const double rear = p.static_load(WheelPosition::RearLeft);

    WheelLoads out;
    out.load = {front + dv + roll_f, front + dv - roll_f, rear - dv + roll_r, rear - dv - roll_r};
    for (std::size_t i = 0; i < 4; ++i) {
        if (out.load[i] < 0.0) {
            out.load[i] = 0.0;
            out.lifted[i] = true;
        }
    }
    return out;
}

StateVector<VehicleState::kSize> VehicleState::pack() const {
    StateVector<kSize> v{};
    v[0] = position.x;
    v[1] = position.y;
    v[2] = position.z;
    v[3] = yaw;
    v[4] = pitch;
    v[5] = roll;
    v[6] = velocity.x;
    v[7] = velocity.y;
    v[8] = velocity.z;
    v[9] = angular_rate.x;
    v[10] = angular_rate.y;
    v[11] = angular_rate.z;
    for (std::size_t i = 0; i < 4; ++i) {
        v[12 + i] = wheel_spin[i];
        v[16 + i] = tyre_slip[i];
    }
    return v;
}

VehicleState VehicleState::unpack(const StateVector<kSize>& v) {
    VehicleState s;
    s.position = {v[0], v[1], v[2]};
    s.yaw = v[3];
    s.pitch = v[4];
    s.roll = v[5];
    s.velocity = {v[6], v[7], v[8]};
    s.angular_rate = {v[9], v[10], v[11]};
    for (std::size_t i = 0; i < 4; ++i) {
        s.wheel_spin[i] = v[12 + i];
        s.tyre_slip[i] = v[16 + i];
    }
    return s;
}

std::array<Vec3, 3> rotation(double yaw, double pitch, double roll) {
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cr = std::cos(roll), sr = std::sin(roll);
    return {Vec3{cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr},
            Vec3{sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr},
            Vec3{-sp, cp * sr, cp * cr}};
}

VehicleState rest_state(const VehicleParameters& p, double x, double y, double heading, double speed) {
    VehicleState s;
    s.position = {x, y, p.gc_height};
    s.yaw = heading;
    s.velocity = {speed, 0.0, 0.0};
    s.wheel_spin.fill(speed / p.wheel_radius);
    refresh_suspension(s, p);
    return s;
}

void refresh_suspension(VehicleState& s, const VehicleParameters& p) {
    const auto R = rotation(s.yaw, s.pitch, s.roll);
    for (auto w : tyre::kWheels) {
        const auto i = tyre::index(w);
        const Vec3 r = p.corner(w);
        const double height = s.position.z + dot(R[2], r);
        const Vec3 v_point = s.velocity + cross(s.angular_rate, r);
        s.suspension_deflection[i] = p.gc_height - height;
        s.suspension_rate[i] = -dot(R[2], v_point);
    }
}

std::array<double, 4> suspension_forces(const VehicleState& s, const VehicleParameters& p) {
    std::array<double, 4> f{};
    const auto& d = s.suspension_deflection;
    const auto& v = s.suspension_rate;
    const double arb_front = p.anti_roll_bar(true) / (p.track_front * p.track_front) * (d[0] - d[1]);
    const double arb_rear = p.anti_roll_bar(false) / (p.track_rear * p.track_rear) * (d[2] - d[3]);
    for (auto w : tyre::kWheels) {
        const auto i = tyre::index(w);
        double force = p.static_load(w) + p.spring(w) * d[i] + p.damper(w) * v[i];
        if (d[i] > p.suspension_travel)
            force += p.bump_stop_stiffness * (d[i] - p.suspension_travel);
        const double arb = tyre::is_front(w) ? arb_front : arb_rear;
        force += tyre::is_left(w) ? arb : -arb;
        f[i] = std::max(0.0, force);
    }
    return f;
}

StateDerivative derivatives(const VehicleState& state, const VehicleParameters& p, const AppliedLoads& loads) {
    VehicleState s = state;
    refresh_suspension(s, p);
    const auto R = rotation(s.yaw, s.pitch, s.roll);
    const Vec3 world_up{R[0].z, R[1].z, R[2].z};  // world z in body axes

    Vec3 force = loads.force + (-p.mass * kGravity) * world_up;
    Vec3 moment = loads.moment;

    const auto spring = suspension_forces(s, p);
    for (auto w : tyre::kWheels) {
        const auto i = tyre::index(w);
        // Suspension pushes along world vertical at the attachment point.
        const Vec3 f_susp = spring[i] * world_up;
        force += f_susp;
        moment += cross(p.corner(w), f_susp);

        force += loads.contact_force[i];
        moment += cross(p.contact_point(w), loads.contact_force[i]);
    }

    const Vec3& w = s.angular_rate;
    const Vec3& I = p.inertia;
    const Vec3 Iw{I.x * w.x, I.y * w.y, I.z * w.z};
    const Vec3 gyro = cross(w, Iw);
    const Vec3 w_dot{(moment.x - gyro.x) / I.x, (moment.y - gyro.y) / I.y, (moment.z - gyro.z) / I.z};
    const Vec3 v_dot = (1.0 / p.mass) * force - cross(w, s.velocity);

    const double sr = std::sin(s.roll), cr = std::cos(s.roll);
    const double cp = std::cos(s.pitch), tp = std::tan(s.pitch);

    StateDerivative d{};
    d[0] = dot(R[0], s.velocity);
    d[1] = dot(R[1], s.velocity);
    d[2] = dot(R[2], s.velocity);
    d[3] = (w.y * sr + w.z * cr) / cp;
    d[4] = w.y * cr - w.z * sr;
    d[5] = w.x + (w.y * sr + w.z * cr) * tp;
    d[6] = v_dot.x;
    d[7] = v_dot.y;
    d[8] = v_dot.z;
    d[9] = w_dot.x;
    d[10] = w_dot.y;
    d[11] = w_dot.z;
    for (std::size_t i = 0; i < 4; ++i) {
        d[12 + i] = loads.wheel_spin_accel[i];
        d[16 + i] = loads.tyre_slip_rate[i];
    }
    return d;
}

StateVector<VehicleState::kSize> step(
    const StateVector<VehicleState::kSize>& y,
    double t,
    double dt,
    const std::function<StateDerivative(double, const StateVector<VehicleState::kSize>&)>& field) {
    if (!(dt > 0.0))
        throw ConfigError("step: dt must be positive");
    auto next = rk4_step(y, t, dt, field);
    if (!all_finite(next))
        throw SimulationFault("non-finite vehicle state", t + dt);
    // Pitch is index 4.
    if (std::abs(next[4]) > deg_to_rad(80.0))
        throw SimulationFault("pitch approached the Euler-angle singularity", t + dt);
    return next;
}

}  // namespace iesp::vehicle
