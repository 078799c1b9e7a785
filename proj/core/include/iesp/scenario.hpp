#pragma once

// Scenario files: vehicle, tyres, course, burst, controller switches and
// driver inputs for one closed-loop run. Files are JSON; every key is
// optional except the course and the duration, and unknown keys are errors.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "iesp/autopilot.hpp"
#include "iesp/esp.hpp"
#include "iesp/fuzzy.hpp"
#include "iesp/tyre.hpp"
#include "iesp/vehicle.hpp"

namespace iesp::sim {

// Piecewise-linear schedule of (time, value) points, held flat outside.
struct Schedule {
    std::vector<std::pair<double, double>> points;

    bool empty() const { return points.empty(); }
    double at(double t) const;
};

struct DriverInputs {
    // Speed hold on the throttle until this time; defaults to the burst time,
    // or the whole run without a burst.
    std::optional<double> cruise_until;
    double cruise_gain = 0.5;  // throttle per m/s of speed error
    // After the cruise phase; empty means hold the last cruise throttle.
    Schedule throttle;
    Schedule brake;  // pedal [0, 1], active for the whole run
};

struct BurstSpec {
    tyre::WheelPosition wheel = tyre::WheelPosition::RearRight;
    double time = 0.0;
};

struct RuleSet {
    fuzzy::RuleBase autopilot;
    fuzzy::RuleBase abs_modulator;
    fuzzy::RuleBase delta_m_yaw;
    fuzzy::RuleBase torque_cut;

    static RuleSet defaults();
};

struct Scenario {
    std::string name = "scenario";
    double duration = 0.0;           // [s]
    double dt = 0.001;               // plant step [s]
    double controller_period = 0.01; // [s]
    double initial_speed = 0.0;      // [m/s]
    // With the brake pedal pressed, the run ends once the speed drops below this.
    double stop_speed = 0.3;         // [m/s]

    vehicle::VehicleParameters vehicle;
    tyre::InflatedFrictionModel intact_tyre;
    tyre::DeflatedFrictionModel burst_tyre;
    double deflation_time = 3.0;     // [s]

    pilot::Pose2 start;
    std::array<pilot::Bend, 4> bends{};

    std::optional<BurstSpec> burst;
    bool iesp_enabled = true;
    bool abs_enabled = true;

    esp::IespParameters iesp;
    pilot::AutopilotParameters autopilot;
    DriverInputs driver;
    RuleSet rules = RuleSet::defaults();

    // Cross-field checks; returns every problem found.
    std::vector<std::string> check() const;
    double cruise_until() const;
    std::size_t steps() const;
    std::size_t controller_stride() const;
};

// Throws ValidationError listing every issue, each prefixed with its JSON
// location. Rule-base paths are resolved against base_dir.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
// Also throws ValidationError for unreadable or malformed files.
Scenario load_scenario(const std::filesystem::path& file);
nlohmann::json read_json_file(const std::filesystem::path& file);

}  // namespace iesp::sim
