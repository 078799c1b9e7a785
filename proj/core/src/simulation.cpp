#include "iesp/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "iesp/abs.hpp"
#include "iesp/errors.hpp"
#include "iesp/esp.hpp"
#include "iesp/plant.hpp"
#include "iesp/vec.hpp"

namespace iesp::sim {

namespace {

using Scalar = double TraceSample::*;
using Quad = std::array<double, 4> TraceSample::*;

struct Field {
    const char* name;
    Scalar scalar = nullptr;
    Quad quad = nullptr;
};

const std::vector<Field>& fields() {
    static const std::vector<Field> table{
        {"t_s", &TraceSample::t},
        {"x_m", &TraceSample::x},
        {"y_m", &TraceSample::y},
        {"z_m", &TraceSample::z},
        {"yaw_rad", &TraceSample::yaw},
        {"pitch_rad", &TraceSample::pitch},
        {"roll_rad", &TraceSample::roll},
        {"vx_m_s", &TraceSample::vx},
        {"vy_m_s", &TraceSample::vy},
        {"vz_m_s", &TraceSample::vz},
        {"roll_rate_rad_s", &TraceSample::roll_rate},
        {"pitch_rate_rad_s", &TraceSample::pitch_rate},
        {"yaw_rate_rad_s", &TraceSample::yaw_rate},
        {"speed_m_s", &TraceSample::speed},
        {"accel_long_m_s2", &TraceSample::accel_long},
        {"accel_lat_m_s2", &TraceSample::accel_lat},
        {"steer_rad", &TraceSample::steer},
        {"steer_kinematic_rad", &TraceSample::steer_kinematic},
        {"steer_correction_rad", &TraceSample::steer_correction},
        {"throttle", &TraceSample::throttle},
        {"brake_pedal", &TraceSample::brake_pedal},
        {"brake_torque_n_m", nullptr, &TraceSample::brake_torque},
        {"delta_m_yaw_n_m", &TraceSample::delta_m_yaw},
        {"torque_cut_pct", &TraceSample::torque_cut},
        {"beta_rad", &TraceSample::beta},
        {"beta_est_rad", &TraceSample::beta_est},
        {"beta_ref_rad", &TraceSample::beta_ref},
        {"yaw_rate_ref_rad_s", &TraceSample::yaw_rate_ref},
        {"yaw_rate_limit_rad_s", &TraceSample::yaw_rate_limit},
        {"e_beta_rad", &TraceSample::e_beta},
        {"e_yaw_rate_rad_s", &TraceSample::e_yaw_rate},
        {"progress_m", &TraceSample::progress},
        {"lateral_offset_m", &TraceSample::lateral_offset},
        {"track_error_m", &TraceSample::track_error},
        {"track_error_mean_m", &TraceSample::track_error_mean},
        {"wheel_spin_rad_s", nullptr, &TraceSample::wheel_spin},
        {"sigma", nullptr, &TraceSample::sigma},
        {"alpha_rad", nullptr, &TraceSample::alpha},
        {"normal_load_n", nullptr, &TraceSample::normal_load},
        {"inflation", nullptr, &TraceSample::inflation},
    };
    return table;
}

constexpr const char* kWheelSuffix[4] = {"_fl", "_fr", "_rl", "_rr"};

// Throttle that balances aerodynamic drag at the given speed.
double cruise_feedforward(const vehicle::VehicleParameters& p, double speed) {
    const double drag = 0.5 * p.air_density * p.drag_area * speed * speed;
    return drag * p.wheel_radius / (p.drive_ratio * p.engine_max_torque);
}

}  // namespace

const std::vector<std::string>& trace_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> out;
        for (const auto& f : fields()) {
            if (f.scalar) {
                out.emplace_back(f.name);
            } else {
                for (const char* s : kWheelSuffix)
                    out.push_back(std::string(f.name) + s);
            }
        }
        return out;
    }();
    return cols;
}

std::vector<double> to_row(const TraceSample& s) {
    std::vector<double> row;
    row.reserve(trace_columns().size());
    for (const auto& f : fields()) {
        if (f.scalar) {
            row.push_back(s.*f.scalar);
        } else {
            for (double v : s.*f.quad)
                row.push_back(v);
        }
    }
    return row;
}

TraceSample from_row(const std::vector<double>& row) {
    if (row.size() != trace_columns().size())
        throw ConfigError("trace row has " + std::to_string(row.size()) + " values, expected " +
                          std::to_string(trace_columns().size()));
    TraceSample s;
    std::size_t k = 0;
    for (const auto& f : fields()) {
        if (f.scalar) {
            s.*f.scalar = row[k++];
        } else {
            for (double& v : s.*f.quad)
                v = row[k++];
        }
    }
    return s;
}

TrackErrorMeter::TrackErrorMeter(const pilot::Trajectory& trajectory) : trajectory_(trajectory) {}

double TrackErrorMeter::update(double x, double y) {
    constexpr double kBack = 5.0;
    constexpr double kAhead = 60.0;
    const auto proj = trajectory_.project(x, y, progress_ - kBack, progress_ + kAhead);
    progress_ = std::max(progress_, proj.s);
    offset_ = proj.lateral_offset;
    sum_ += proj.distance;
    ++count_;
    return proj.distance;
}

pilot::Trajectory trajectory_of(const Scenario& scenario) {
    return pilot::Trajectory(scenario.start, scenario.bends);
}

RunResult run(const Scenario& sc) {
    using vehicle::VehicleState;
    const auto& p = sc.vehicle;

    vehicle::TyreSetup tyres{sc.intact_tyre, std::nullopt};
    if (sc.burst)
        tyres.burst = tyre::BurstEvent{sc.burst->wheel, sc.burst->time, sc.deflation_time, sc.burst_tyre};
    const vehicle::Plant plant(p, tyres);

    const auto trajectory = trajectory_of(sc);
    pilot::Autopilot pilot(sc.rules.autopilot, sc.autopilot, p.wheelbase);
    const abs::BrakeModulator modulator(sc.rules.abs_modulator, p.brake_max_torque);
    esp::Iesp iesp(sc.rules.delta_m_yaw, sc.rules.torque_cut, sc.iesp, p.wheelbase, p.gc_to_rear, p.wheel_radius,
                   p.half_track(vehicle::WheelPosition::FrontLeft), p.half_track(vehicle::WheelPosition::RearLeft));
    TrackErrorMeter meter(trajectory);

    VehicleState state = vehicle::rest_state(p, sc.start.x, sc.start.y, sc.start.heading, sc.initial_speed);
    vehicle::ActuationSet u;

    const std::size_t steps = sc.steps();
    const std::size_t stride = sc.controller_stride();
    const double period = sc.dt * static_cast<double>(stride);
    const double cruise_until = sc.cruise_until();

    RunResult result;
    result.trace.period = period;
    result.trace.samples.reserve(steps / stride + 1);

    double beta = state.slip_angle();
    double beta_raw = beta;
    double held_throttle = 0.0;
    std::array<double, 4> prev_sigma{};
    bool first_tick = true;

    const std::function<vehicle::StateDerivative(double, const StateVector<VehicleState::kSize>&)> field =
        [&](double t, const StateVector<VehicleState::kSize>& y) {
            return plant.evaluate(VehicleState::unpack(y), u, t).derivative;
        };

    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * sc.dt;

        if (k % stride == 0) {
            const auto out = plant.evaluate(state, u, t);
            const double speed = state.speed();
            const double yaw_rate = state.angular_rate.z;

            // The driver steers on the direction of travel, which differs from the
            // nose direction by the body slip angle.
            const double course = speed > 1.0 ? state.yaw + state.slip_angle() : state.yaw;
            const auto cmd = pilot.command(trajectory, state.position.x, state.position.y, course, yaw_rate, speed);

            const double pedal = std::clamp(sc.driver.brake.at(t), 0.0, 1.0);
            double throttle;
            if (t < cruise_until) {
                throttle = cruise_feedforward(p, sc.initial_speed) +
                           sc.driver.cruise_gain * (sc.initial_speed - speed);
                throttle = std::clamp(throttle, 0.0, 1.0);
                held_throttle = throttle;
            } else if (!sc.driver.throttle.empty()) {
                throttle = std::clamp(sc.driver.throttle.at(t), 0.0, 1.0);
            } else {
                throttle = held_throttle;
            }
            if (pedal > 0.0)
                throttle = 0.0;

            esp::IespInputs in;
            in.steer = cmd.steer;
            in.speed = speed;
            in.yaw_rate = yaw_rate;
            in.a_lat = out.accel_lat;
            in.loads = vehicle::vertical_loads(p, -out.accel_long, -out.accel_lat).load;
            auto stab = iesp.tick(in, period);
            if (!sc.iesp_enabled) {
                stab.delta_m_yaw = 0.0;
                stab.torque_cut_percent = 0.0;
                stab.brake_delta = {};
            }

            abs::BrakeDemand demand;
            demand.pedal = pedal;
            demand.iesp_delta = stab.brake_delta;
            std::array<double, 4> raw{};
            for (std::size_t i = 0; i < 4; ++i) {
                const double sigma = out.wheels[i].kinematic_slip;
                demand.sigma[i] = sigma;
                demand.sigma_rate[i] = first_tick ? 0.0 : (sigma - prev_sigma[i]) / period;
                prev_sigma[i] = sigma;
                raw[i] = pedal * p.brake_max_torque + stab.brake_delta[i];
            }
            if (sc.abs_enabled)
                raw = modulator.modulate(demand);
            const auto brakes = abs::brake_distributor(raw, -out.accel_long, -out.accel_lat, p);
            first_tick = false;

            u.steer = cmd.steer;
            u.throttle = throttle;
            u.brake_torque = brakes.torque;
            u.torque_cut_percent = stab.torque_cut_percent;

            TraceSample smp;
            smp.t = t;
            smp.x = state.position.x;
            smp.y = state.position.y;
            smp.z = state.position.z;
            smp.yaw = state.yaw;
            smp.pitch = state.pitch;
            smp.roll = state.roll;
            smp.vx = state.velocity.x;
            smp.vy = state.velocity.y;
            smp.vz = state.velocity.z;
            smp.roll_rate = state.angular_rate.x;
            smp.pitch_rate = state.angular_rate.y;
            smp.yaw_rate = yaw_rate;
            smp.speed = speed;
            smp.accel_long = out.accel_long;
            smp.accel_lat = out.accel_lat;
            smp.steer = u.steer;
            smp.steer_kinematic = cmd.kinematic;
            smp.steer_correction = cmd.correction;
            smp.throttle = throttle;
            smp.brake_pedal = pedal;
            smp.brake_torque = u.brake_torque;
            smp.delta_m_yaw = stab.delta_m_yaw;
            smp.torque_cut = u.torque_cut_percent;
            smp.beta = beta;
            smp.beta_est = stab.slip_angle_estimate;
            smp.beta_ref = stab.reference.slip_angle_ref;
            smp.yaw_rate_ref = stab.reference.yaw_rate_ref;
            smp.yaw_rate_limit = stab.reference.yaw_rate_limit;
            smp.e_beta = stab.errors.e_beta;
            smp.e_yaw_rate = stab.errors.e_yaw_rate;
            smp.track_error = meter.update(state.position.x, state.position.y);
            smp.track_error_mean = meter.mean();
            smp.progress = meter.progress();
            smp.lateral_offset = meter.lateral_offset();
            smp.wheel_spin = state.wheel_spin;
            for (std::size_t i = 0; i < 4; ++i) {
                smp.sigma[i] = out.wheels[i].kinematic_slip;
                smp.alpha[i] = out.wheels[i].contact.alpha;
                smp.normal_load[i] = out.wheels[i].contact.normal_load;
                smp.inflation[i] = out.wheels[i].contact.inflation_blend;
            }
            result.trace.samples.push_back(smp);

            if (cmd.end_of_course) {
                result.end_of_course = true;
                break;
            }
            if (pedal > 0.0 && speed < sc.stop_speed) {
                result.stopped = true;
                break;
            }
        }
        if (k >= steps)
            break;

        try {
            auto y = vehicle::step(state.pack(), t, sc.dt, field);
            state = VehicleState::unpack(y);
            vehicle::refresh_suspension(state, p);
        } catch (const SimulationFault& f) {
            result.fault = FaultRecord{f.time(), f.what()};
            break;
        }

        const double raw_now = state.slip_angle();
        if (state.speed() > 0.5)
            beta += pilot::wrap_angle(raw_now - beta_raw);
        beta_raw = raw_now;
    }
    return result;
}

RunMetrics compute_metrics(const SimTrace& trace, const pilot::Trajectory& trajectory) {
    RunMetrics m;
    TrackErrorMeter meter(trajectory);
    for (const auto& s : trace.samples) {
        const double beta_deg = std::abs(rad_to_deg(s.beta));
        m.max_abs_beta_deg = std::max(m.max_abs_beta_deg, beta_deg);
        if (beta_deg > 360.0 && !m.spin) {
            m.spin = true;
            m.spin_time = s.t;
        }
        const double e = meter.update(s.x, s.y);
        m.max_track_error = std::max(m.max_track_error, e);
        m.max_track_error_mean = std::max(m.max_track_error_mean, meter.mean());
        m.max_abs_yaw_rate_error = std::max(m.max_abs_yaw_rate_error, std::abs(s.e_yaw_rate));
    }
    m.final_track_error_mean = meter.mean();
    return m;
}

}  // namespace iesp::sim
