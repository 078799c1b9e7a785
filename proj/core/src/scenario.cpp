#include "iesp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "iesp/default_rules.hpp"
#include "iesp/errors.hpp"
#include "iesp/vec.hpp"

namespace iesp::sim {

using nlohmann::json;

double Schedule::at(double t) const {
    if (points.empty())
        return 0.0;
    if (t <= points.front().first)
        return points.front().second;
    if (t >= points.back().first)
        return points.back().second;
    auto hi = std::upper_bound(points.begin(), points.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    auto lo = hi - 1;
    const double span = hi->first - lo->first;
    if (span <= 0.0)
        return hi->second;
    return lo->second + (hi->second - lo->second) * (t - lo->first) / span;
}

RuleSet RuleSet::defaults() {
    return RuleSet{rules::default_autopilot(), rules::default_abs_modulator(), rules::default_delta_m_yaw(),
                   rules::default_torque_cut()};
}

double Scenario::cruise_until() const {
    if (driver.cruise_until)
        return *driver.cruise_until;
    return burst ? burst->time : duration;
}

std::size_t Scenario::steps() const {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

std::size_t Scenario::controller_stride() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(controller_period / dt)));
}

std::vector<std::string> Scenario::check() const {
    std::vector<std::string> issues;
    auto guard = [&](const std::string& where, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError& e) {
            issues.push_back(where + ": " + e.what());
        }
    };
    if (!(duration > 0.0) || !std::isfinite(duration))
        issues.push_back("/duration_s: must be positive");
    if (!(dt > 0.0) || !(dt <= 0.01))
        issues.push_back("/dt_s: must be in (0, 0.01]");
    if (!(controller_period >= dt))
        issues.push_back("/controller_period_s: must be >= dt_s");
    else if (std::abs(controller_period / dt - std::round(controller_period / dt)) > 1e-6)
        issues.push_back("/controller_period_s: must be a whole multiple of dt_s");
    if (!(initial_speed >= 0.0) || !std::isfinite(initial_speed))
        issues.push_back("/initial_speed_kmh: must be >= 0");
    if (!(stop_speed >= 0.0))
        issues.push_back("/stop_speed_m_per_s: must be >= 0");
    guard("/vehicle", [&] { vehicle.validate(); });
    guard("/tyres/intact", [&] { intact_tyre.validate(); });
    guard("/tyres/burst", [&] { burst_tyre.validate(); });
    if (!(deflation_time > 0.0))
        issues.push_back("/tyres/burst/deflation_s: must be positive");
    guard("/trajectory", [&] { pilot::Trajectory(start, bends); });
    if (burst && (!(burst->time >= 0.0) || !(burst->time < duration)))
        issues.push_back("/burst/time_s: must lie in [0, duration_s)");
    guard("/iesp", [&] { iesp.validate(); });
    if (!(autopilot.correction_limit > 0.0))
        issues.push_back("/autopilot/correction_limit_rad: must be positive");
    if (!(autopilot.preview_time >= 0.0))
        issues.push_back("/autopilot/preview_s: must be >= 0");
    if (driver.cruise_until && !(*driver.cruise_until >= 0.0))
        issues.push_back("/driver/cruise_until_s: must be >= 0");
    if (!(driver.cruise_gain >= 0.0))
        issues.push_back("/driver/cruise_gain_per_m_per_s: must be >= 0");
    auto check_schedule = [&](const Schedule& s, const std::string& where) {
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const auto& [t, v] = s.points[i];
            if (!(v >= 0.0 && v <= 1.0))
                issues.push_back(where + "/" + std::to_string(i) + ": value must lie in [0, 1]");
            if (i > 0 && !(t >= s.points[i - 1].first))
                issues.push_back(where + "/" + std::to_string(i) + ": times must not decrease");
        }
    };
    check_schedule(driver.throttle, "/driver/throttle");
    check_schedule(driver.brake, "/driver/brake");
    return issues;
}

namespace {

// Walks one JSON object, recording type errors and unknown keys.
class Reader {
  public:
    Reader(const json* obj, std::string path, std::vector<std::string>& issues)
        : obj_(obj), path_(std::move(path)), issues_(issues) {
        if (obj_ && !obj_->is_object()) {
            issue("", "expected an object");
            obj_ = nullptr;
        }
    }

    Reader(const Reader&) = delete;

    ~Reader() {
        if (!obj_)
            return;
        for (const auto& [key, value] : obj_->items()) {
            if (!seen_.count(key))
                issue("/" + key, "unknown key");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_ && obj_->contains(key);
    }

    const json* raw(const std::string& key) {
        return has(key) ? &(*obj_)[key] : nullptr;
    }

    std::string path(const std::string& key) const { return path_ + "/" + key; }

    void number(const std::string& key, double& out, double scale = 1.0) {
        const json* v = raw(key);
        if (!v)
            return;
        if (!v->is_number()) {
            issue("/" + key, "expected a number");
            return;
        }
        out = v->get<double>() * scale;
    }

    void number(const std::string& key, std::optional<double>& out) {
        double v = 0.0;
        if (raw(key)) {
            const auto before = issues_.size();
            number(key, v);
            if (issues_.size() == before)
                out = v;
        }
    }

    void boolean(const std::string& key, bool& out) {
        const json* v = raw(key);
        if (!v)
            return;
        if (!v->is_boolean()) {
            issue("/" + key, "expected true or false");
            return;
        }
        out = v->get<bool>();
    }

    void string(const std::string& key, std::string& out) {
        const json* v = raw(key);
        if (!v)
            return;
        if (!v->is_string()) {
            issue("/" + key, "expected a string");
            return;
        }
        out = v->get<std::string>();
    }

    void require(const std::string& key) {
        if (!has(key))
            issue("/" + key, "required key is missing");
    }

    void issue(const std::string& suffix, const std::string& what) {
        issues_.push_back((path_.empty() && suffix.empty() ? "/" : path_ + suffix) + ": " + what);
    }

    std::vector<std::string>& issues() { return issues_; }

  private:
    const json* obj_;
    std::string path_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
};

void read_vehicle(Reader& r, vehicle::VehicleParameters& v) {
    r.number("mass_kg", v.mass);
    r.number("wheelbase_m", v.wheelbase);
    r.number("gc_to_rear_axle_m", v.gc_to_rear);
    r.number("gc_height_m", v.gc_height);
    r.number("track_front_m", v.track_front);
    r.number("track_rear_m", v.track_rear);
    r.number("wheel_radius_m", v.wheel_radius);
    r.number("roll_inertia_kg_m2", v.inertia.x);
    r.number("pitch_inertia_kg_m2", v.inertia.y);
    r.number("yaw_inertia_kg_m2", v.inertia.z);
    r.number("wheel_inertia_kg_m2", v.wheel_inertia);
    r.number("spring_front_n_per_m", v.spring_front);
    r.number("spring_rear_n_per_m", v.spring_rear);
    r.number("damper_front_n_s_per_m", v.damper_front);
    r.number("damper_rear_n_s_per_m", v.damper_rear);
    r.number("roll_stiffness_front_n_m_per_rad", v.roll_stiffness_front);
    r.number("roll_stiffness_rear_n_m_per_rad", v.roll_stiffness_rear);
    r.number("suspension_travel_m", v.suspension_travel);
    r.number("bump_stop_n_per_m", v.bump_stop_stiffness);
    r.number("drag_area_m2", v.drag_area);
    r.number("air_density_kg_per_m3", v.air_density);
    r.number("engine_max_torque_n_m", v.engine_max_torque);
    r.number("drive_ratio", v.drive_ratio);
    r.boolean("front_wheel_drive", v.front_wheel_drive);
    r.number("brake_max_torque_n_m", v.brake_max_torque);
    r.number("max_steer_deg", v.max_steer, kPi / 180.0);
    r.number("relaxation_length_m", v.relaxation_length);
    r.number("slip_v_eps_m_per_s", v.slip_v_eps);
}

void read_schedule(Reader& r, const std::string& key, Schedule& out) {
    const json* v = r.raw(key);
    if (!v)
        return;
    if (!v->is_array()) {
        r.issue("/" + key, "expected an array of [time_s, value] pairs");
        return;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
        const json& p = (*v)[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            r.issue("/" + key + "/" + std::to_string(i), "expected [time_s, value]");
            continue;
        }
        out.points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
}

void read_rules(Reader& r, const std::string& key, const std::filesystem::path& base_dir,
                fuzzy::RuleBase& out) {
    const json* v = r.raw(key);
    if (!v)
        return;
    try {
        if (v->is_string()) {
            std::filesystem::path p = v->get<std::string>();
            if (p.is_relative())
                p = base_dir / p;
            out = fuzzy::load_rule_base(p);
        } else if (v->is_object()) {
            out = fuzzy::rule_base_from_json(*v);
        } else {
            r.issue("/" + key, "expected a rule-base path or an inline rule base");
        }
    } catch (const std::exception& e) {
        r.issue("/" + key, e.what());
    }
}

}  // namespace

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
    std::vector<std::string> issues;
    Scenario sc;
    {
        Reader top(&doc, "", issues);
        top.string("name", sc.name);
        top.require("duration_s");
        top.number("duration_s", sc.duration);
        top.number("dt_s", sc.dt);
        top.number("controller_period_s", sc.controller_period);
        top.number("initial_speed_kmh", sc.initial_speed, 1.0 / 3.6);
        top.number("stop_speed_m_per_s", sc.stop_speed);

        if (const json* v = top.raw("vehicle")) {
            Reader r(v, top.path("vehicle"), issues);
            read_vehicle(r, sc.vehicle);
        }

        if (const json* v = top.raw("tyres")) {
            Reader r(v, top.path("tyres"), issues);
            if (const json* w = r.raw("intact")) {
                Reader t(w, r.path("intact"), issues);
                auto& m = sc.intact_tyre;
                t.number("mu_long_max", m.mu_long_max);
                t.number("mu_trasv_max", m.mu_trasv_max);
                t.number("sigma_p", m.sigma_p);
                t.number("alpha_p_deg", m.alpha_p, kPi / 180.0);
                t.number("sliding_ratio", m.sliding_ratio);
                t.number("falloff", m.falloff);
                t.number("load_sensitivity", m.load_sensitivity);
                t.number("reference_load_n", m.reference_load);
            }
            if (const json* w = r.raw("burst")) {
                Reader t(w, r.path("burst"), issues);
                t.number("mu_long", sc.burst_tyre.mu_long_burst);
                t.number("mu_trasv", sc.burst_tyre.mu_trasv_burst);
                t.number("deflation_s", sc.deflation_time);
            }
        }

        top.require("trajectory");
        if (const json* v = top.raw("trajectory")) {
            Reader r(v, top.path("trajectory"), issues);
            if (const json* s = r.raw("start")) {
                Reader st(s, r.path("start"), issues);
                st.number("x_m", sc.start.x);
                st.number("y_m", sc.start.y);
                st.number("heading_deg", sc.start.heading, kPi / 180.0);
            }
            r.require("bends");
            if (const json* b = r.raw("bends")) {
                if (!b->is_array() || b->size() != 4) {
                    r.issue("/bends", "expected exactly four bends");
                } else {
                    for (std::size_t i = 0; i < 4; ++i) {
                        Reader br(&(*b)[i], r.path("bends") + "/" + std::to_string(i), issues);
                        br.require("length_m");
                        br.number("length_m", sc.bends[i].length);
                        br.number("curvature_per_m", sc.bends[i].curvature);
                    }
                }
            }
        }

        if (const json* v = top.raw("burst")) {
            if (!v->is_null()) {
                Reader r(v, top.path("burst"), issues);
                BurstSpec b;
                std::string wheel(tyre::to_string(b.wheel));
                r.string("wheel", wheel);
                try {
                    b.wheel = tyre::wheel_from_string(wheel);
                } catch (const ConfigError& e) {
                    r.issue("/wheel", e.what());
                }
                r.require("time_s");
                r.number("time_s", b.time);
                sc.burst = b;
            }
        }

        if (const json* v = top.raw("controllers")) {
            Reader r(v, top.path("controllers"), issues);
            r.boolean("iesp", sc.iesp_enabled);
            r.boolean("abs", sc.abs_enabled);
        }

        if (const json* v = top.raw("iesp")) {
            Reader r(v, top.path("iesp"), issues);
            auto& p = sc.iesp;
            r.number("k_us_s2_per_m2", p.k_us);
            r.number("k_ps_s2_per_m2", p.k_ps);
            r.number("mu_y_max", p.mu_y_max);
            r.number("v_floor_m_per_s", p.v_floor);
            r.number("tau_beta_s", p.tau_beta);
            r.number("dry_beta_limit_deg", p.dry_beta_limit, kPi / 180.0);
            r.number("icy_beta_limit_deg", p.icy_beta_limit, kPi / 180.0);
            read_rules(r, "delta_m_yaw_rules", base_dir, sc.rules.delta_m_yaw);
            read_rules(r, "torque_cut_rules", base_dir, sc.rules.torque_cut);
        }

        if (const json* v = top.raw("abs")) {
            Reader r(v, top.path("abs"), issues);
            read_rules(r, "rules", base_dir, sc.rules.abs_modulator);
        }

        if (const json* v = top.raw("autopilot")) {
            Reader r(v, top.path("autopilot"), issues);
            r.number("preview_s", sc.autopilot.preview_time);
            r.number("correction_limit_rad", sc.autopilot.correction_limit);
            read_rules(r, "rules", base_dir, sc.rules.autopilot);
        }

        if (const json* v = top.raw("driver")) {
            Reader r(v, top.path("driver"), issues);
            r.number("cruise_until_s", sc.driver.cruise_until);
            r.number("cruise_gain_per_m_per_s", sc.driver.cruise_gain);
            read_schedule(r, "throttle", sc.driver.throttle);
            read_schedule(r, "brake", sc.driver.brake);
        }
    }
    sc.autopilot.max_steer = sc.vehicle.max_steer;

    if (issues.empty()) {
        auto more = sc.check();
        issues.insert(issues.end(), more.begin(), more.end());
    }
    if (!issues.empty())
        throw ValidationError(std::move(issues));
    return sc;
}

json read_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ValidationError({file.string() + ": cannot open file"});
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError({file.string() + ": " + e.what()});
    }
}

Scenario load_scenario(const std::filesystem::path& file) {
    const json doc = read_json_file(file);
    return scenario_from_json(doc, file.parent_path());
}

}  // namespace iesp::sim
