#pragma once

// Lumped-mass car: 6-DOF body on four spring-damper corners, plus wheel
// spin and a relaxed longitudinal tyre slip per wheel.
//
// Frames: world x/y horizontal, z up. Body x forward, y left, z up. Euler
// angles are applied yaw (z), pitch (y), roll (x). Positive yaw rate turns
// left.

#include <array>
#include <functional>

#include "iesp/integrator.hpp"
#include "iesp/tyre.hpp"
#include "iesp/vec.hpp"

namespace iesp::vehicle {

using tyre::WheelPosition;

struct VehicleParameters {
    double mass = 1500.0;        // m [kg]
    double wheelbase = 2.6;      // l [m]
    double gc_to_rear = 1.3;     // b [m]
    double gc_height = 0.55;     // h_G [m]
    double track_front = 1.5;    // full axle width [m]
    double track_rear = 1.5;     // full axle width [m]
    double wheel_radius = 0.3;   // r_w [m]
    Vec3 inertia{550.0, 2200.0, 2500.0};  // roll, pitch, yaw [kg m^2]
    double wheel_inertia = 1.2;  // spin inertia incl. brake disc [kg m^2]
    double spring_front = 30000.0;  // per corner [N/m]
    double spring_rear = 30000.0;
    double damper_front = 3000.0;  // per corner [N s/m]
    double damper_rear = 3000.0;
    double roll_stiffness_front = 60000.0;  // K_rollF [N m/rad], springs + anti-roll bar
    double roll_stiffness_rear = 40000.0;   // K_rollR [N m/rad]
    double suspension_travel = 0.1;     // compression before the bump stop [m]
    double bump_stop_stiffness = 3.0e5;  // [N/m]
    double drag_area = 0.7;             // Cd * A [m^2]
    double air_density = 1.225;         // [kg/m^3]
    double engine_max_torque = 250.0;   // [N m]
    double drive_ratio = 7.0;           // engine to wheel, fixed gear
    bool front_wheel_drive = true;
    double brake_max_torque = 2500.0;   // per wheel [N m]
    double max_steer = 0.6;             // road-wheel angle limit [rad]
    double relaxation_length = 0.3;     // longitudinal slip lag [m]
    double slip_v_eps = 0.5;            // slip regularisation speed [m/s]

    // Throws ConfigError.
    void validate() const;

    double gc_to_front() const { return wheelbase - gc_to_rear; }
    double half_track(WheelPosition w) const;
    double mean_track() const { return 0.5 * (track_front + track_rear); }
    // Body-frame position of the suspension attachment (at GC height).
    Vec3 corner(WheelPosition w) const;
    // Body-frame position of the contact patch for the reference ride height.
    Vec3 contact_point(WheelPosition w) const;
    double static_load(WheelPosition w) const;
    double spring(WheelPosition w) const;
    double damper(WheelPosition w) const;
    // Anti-roll bar share of the axle roll stiffness; what the corner springs
    // do not already provide.
    double anti_roll_bar(bool front) const;
};

// Quasi-static loads from measured accelerations. a_long is deceleration-positive and a_trasv is
// rightward-positive, so braking loads the front pair and a right-hand
// turn loads the left side (the '+' rows).
struct WheelLoads {
    std::array<double, 4> load{};
    std::array<bool, 4> lifted{};
    bool any_lifted() const { return lifted[0] || lifted[1] || lifted[2] || lifted[3]; }
    double total() const { return load[0] + load[1] + load[2] + load[3]; }
};

// Longitudinal load transfer m * a_long * h_G / l across the axles.
double longitudinal_transfer(const VehicleParameters& p, double a_long);
// Lateral load transfer m / c * h_G * a_trasv split over the axles by roll
// stiffness: {front, rear}.
std::array<double, 2> roll_transfer(const VehicleParameters& p, double a_trasv);
WheelLoads vertical_loads(const VehicleParameters& p, double a_long, double a_trasv);

struct VehicleState {
    Vec3 position;              // GC, world [m]
    double yaw = 0.0;           // psi [rad]
    double pitch = 0.0;         // theta [rad]
    double roll = 0.0;          // phi [rad]
    Vec3 velocity;              // GC, body frame [m/s]
    Vec3 angular_rate;          // body frame p, q, r [rad/s]
    std::array<double, 4> wheel_spin{};  // [rad/s]
    std::array<double, 4> tyre_slip{};   // relaxed longitudinal slip [-]
    // Derived from the body pose; refreshed by refresh_suspension().
    std::array<double, 4> suspension_deflection{};  // compression-positive [m]
    std::array<double, 4> suspension_rate{};        // [m/s]

    static constexpr std::size_t kSize = 20;
    StateVector<kSize> pack() const;
    // Derived fields are left zero; call refresh_suspension().
    static VehicleState unpack(const StateVector<kSize>& v);

    double speed() const { return std::hypot(velocity.x, velocity.y); }
    // Body slip angle beta: direction of the GC velocity relative to the
    // longitudinal axis, in (-pi, pi].
    double slip_angle() const { return std::atan2(velocity.y, velocity.x); }
};

using StateDerivative = StateVector<VehicleState::kSize>;

// Static ride height, straight-ahead motion at the given speed, free-rolling
// wheels.
VehicleState rest_state(const VehicleParameters& p, double x, double y, double heading, double speed);

// Body-to-world rotation rows.
std::array<Vec3, 3> rotation(double yaw, double pitch, double roll);

void refresh_suspension(VehicleState& s, const VehicleParameters& p);

// Upward suspension force per corner, clamped at zero on wheel lift.
std::array<double, 4> suspension_forces(const VehicleState& s, const VehicleParameters& p);

// Everything but gravity and the suspension, which derivatives() adds from
// the state itself.
struct AppliedLoads {
    std::array<Vec3, 4> contact_force{};        // body frame, at contact_point()
    Vec3 force;                                 // body frame, through the GC
    Vec3 moment;                                // body frame
    std::array<double, 4> wheel_spin_accel{};   // [rad/s^2]
    std::array<double, 4> tyre_slip_rate{};     // [1/s]
};

// Newton-Euler body equations with ZYX Euler kinematics.
StateDerivative derivatives(const VehicleState& s, const VehicleParameters& p, const AppliedLoads& loads);

// One RK4 step of the packed state; throws SimulationFault when the result
// is not finite or the pitch approaches the Euler singularity.
StateVector<VehicleState::kSize> step(const StateVector<VehicleState::kSize>& y,
                                      double t,
                                      double dt,
                                      const std::function<StateDerivative(double, const StateVector<VehicleState::kSize>&)>& field);

}  // namespace iesp::vehicle
