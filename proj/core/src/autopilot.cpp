#include "iesp/autopilot.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "iesp/errors.hpp"
#include "iesp/vec.hpp"

namespace iesp::pilot {

namespace {

constexpr double kStraight = 1e-12;

}  // namespace

// Result in (-pi, pi].
double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

double kinematic_steer(double wheelbase, double curvature) {
    return std::atan(wheelbase * curvature);
}

Trajectory::Trajectory(Pose2 start, std::array<Bend, 4> bends) : start_(start), bends_(bends) {
    double total = 0.0;
    for (std::size_t k = 0; k < bends_.size(); ++k) {
        const auto& b = bends_[k];
        if (!(b.length >= 0.0) || !std::isfinite(b.length) || !std::isfinite(b.curvature))
            throw ConfigError("trajectory: bend " + std::to_string(k + 1) + " needs a finite length >= 0");
        total += b.length;
        ends_[k] = total;
    }
    if (!(total > 0.0))
        throw ConfigError("trajectory: total length must be positive");

    starts_[0] = start_;
    for (std::size_t k = 1; k < bends_.size(); ++k) {
        const auto end = evaluate_in(k - 1, bends_[k - 1].length);
        starts_[k] = {end.x, end.y, end.heading};
    }
}

PathSample Trajectory::evaluate_in(std::size_t k, double ls) const {
    const Pose2& p0 = k == 0 ? start_ : starts_[k];
    const double kappa = bends_[k].curvature;
    PathSample out;
    out.curvature = kappa;
    if (std::abs(kappa) < kStraight) {
        out.x = p0.x + ls * std::cos(p0.heading);
        out.y = p0.y + ls * std::sin(p0.heading);
        out.heading = p0.heading;
        return out;
    }
    const double h = p0.heading + kappa * ls;
    out.x = p0.x + (std::sin(h) - std::sin(p0.heading)) / kappa;
    out.y = p0.y - (std::cos(h) - std::cos(p0.heading)) / kappa;
    out.heading = h;
    out.radius = 1.0 / std::abs(kappa);
    return out;
}

PathSample Trajectory::evaluate(double s) const {
    const bool clamped = s < 0.0 || s > total_length();
    s = std::clamp(s, 0.0, total_length());
    std::size_t k = 0;
    while (k + 1 < bends_.size() && (s > ends_[k] || bends_[k].length == 0.0))
        ++k;
    const double begin = ends_[k] - bends_[k].length;
    auto out = evaluate_in(k, s - begin);
    out.clamped = clamped;
    return out;
}

Projection Trajectory::project(double x, double y) const {
    return project(x, y, 0.0, total_length());
}

Projection Trajectory::project(double x, double y, double s_min, double s_max) const {
    s_min = std::clamp(s_min, 0.0, total_length());
    s_max = std::clamp(s_max, s_min, total_length());

    Projection best;
    best.distance = std::numeric_limits<double>::infinity();

    auto consider = [&](std::size_t k, double begin, double ls) {
        const auto p = evaluate_in(k, ls);
        const double dx = x - p.x, dy = y - p.y;
        const double d = std::hypot(dx, dy);
        if (d < best.distance) {
            best.s = begin + ls;
            best.distance = d;
            best.lateral_offset = -std::sin(p.heading) * dx + std::cos(p.heading) * dy;
            best.heading = p.heading;
            best.curvature = p.curvature;
        }
    };

    for (std::size_t k = 0; k < bends_.size(); ++k) {
        const double begin = ends_[k] - bends_[k].length;
        const double lo = std::max(s_min, begin) - begin;
        const double hi = std::min(s_max, ends_[k]) - begin;
        if (bends_[k].length == 0.0 || lo > hi)
            continue;

        const Pose2& p0 = starts_[k];
        const double kappa = bends_[k].curvature;
        std::vector<double> candidates{lo, hi};
        if (std::abs(kappa) < kStraight) {
            const double t = (x - p0.x) * std::cos(p0.heading) + (y - p0.y) * std::sin(p0.heading);
            candidates.push_back(std::clamp(t, lo, hi));
        } else {
            const double cx = p0.x - std::sin(p0.heading) / kappa;
            const double cy = p0.y + std::cos(p0.heading) / kappa;
            const double dx = x - cx, dy = y - cy;
            if (dx != 0.0 || dy != 0.0) {
                const double h = kappa > 0.0 ? std::atan2(dx, -dy) : std::atan2(-dx, dy);
                const double period = 2.0 * kPi / std::abs(kappa);
                double ls = std::fmod((h - p0.heading) / kappa, period);
                if (ls < 0.0)
                    ls += period;
                // Move to the first periodic image at or after lo.
                ls += std::ceil((lo - ls) / period) * period;
                for (; ls <= hi; ls += period)
                    candidates.push_back(ls);
            }
        }
        for (double ls : candidates)
            consider(k, begin, ls);
    }
    return best;
}

Autopilot::Autopilot(fuzzy::RuleBase rules, AutopilotParameters params, double wheelbase)
    : rules_(std::move(rules)), params_(params), wheelbase_(wheelbase) {
    if (rules_.inputs().size() != 2)
        throw ConfigError("autopilot rule base needs two inputs (preview offset, yaw-rate error)");
    if (!(params_.correction_limit > 0.0) || !(params_.max_steer > 0.0))
        throw ConfigError("autopilot: steering limits must be positive");
    if (!(params_.preview_time >= 0.0))
        throw ConfigError("autopilot: preview time must be >= 0");
}

void Autopilot::reset(double progress) {
    progress_ = progress;
    last_steer_ = 0.0;
}

double Autopilot::fuzzy_correction(const TrackingError& err, double yaw_rate, double speed) const {
    const double preview = err.lateral_offset + params_.preview_time * speed * std::sin(err.heading_error);
    const double yaw_rate_error = yaw_rate - err.path_curvature * speed;
    const double out = rules_.evaluate(preview, yaw_rate_error);
    return std::clamp(out, -params_.correction_limit, params_.correction_limit);
}

TrackingError Autopilot::track(const Trajectory& traj, double x, double y, double yaw) {
    const auto proj = traj.project(x, y, progress_ - params_.search_back, progress_ + params_.search_ahead);
    progress_ = std::max(progress_, proj.s);
    TrackingError err;
    err.lateral_offset = proj.lateral_offset;
    err.heading_error = wrap_angle(yaw - proj.heading);
    err.progress = progress_;
    err.path_curvature = proj.curvature;
    return err;
}

PilotCommand Autopilot::command(const Trajectory& traj, double x, double y, double yaw, double yaw_rate,
                                double speed) {
    PilotCommand cmd;
    cmd.error = track(traj, x, y, yaw);
    if (cmd.error.progress >= traj.total_length()) {
        cmd.end_of_course = true;
        cmd.steer = last_steer_;
        return cmd;
    }
    cmd.kinematic = kinematic_steer(wheelbase_, cmd.error.path_curvature);
    cmd.correction = fuzzy_correction(cmd.error, yaw_rate, speed);
    cmd.steer = std::clamp(cmd.kinematic + cmd.correction, -params_.max_steer, params_.max_steer);
    last_steer_ = cmd.steer;
    return cmd;
}

}  // namespace iesp::pilot
