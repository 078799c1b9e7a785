#pragma once

// Anti-blockage layer: a fuzzy brake modulator in front of a load-based
// brake distributor.

#include <array>

#include "iesp/fuzzy.hpp"
#include "iesp/vehicle.hpp"

namespace iesp::abs {

struct BrakeDemand {
    double pedal = 0.0;                    // [0, 1]
    std::array<double, 4> iesp_delta{};    // extra torque requested by the stability program [N m]
    std::array<double, 4> sigma{};         // wheel slip, locked = -1
    std::array<double, 4> sigma_rate{};    // [1/s]
};

struct BrakeCommand {
    std::array<double, 4> torque{};
    std::array<bool, 4> lifted{};
};

// The rule base maps (braking slip magnitude, its rate) to a multiplier in
// [0, 1] applied to the driver plus stability-program demand.
class BrakeModulator {
  public:
    BrakeModulator(fuzzy::RuleBase rules, double max_torque);

    const fuzzy::RuleBase& rules() const { return rules_; }

    double multiplier(double sigma, double sigma_rate) const;
    std::array<double, 4> modulate(const BrakeDemand& demand) const;

  private:
    fuzzy::RuleBase rules_;
    double max_torque_;
};

// Each raw torque is scaled by its wheel's share of the total vertical load,
// normalised so that four equal shares leave it unchanged, then clamped to
// [0, brake_max_torque]. Loads come from vertical_loads() with the same
// sign conventions.
BrakeCommand brake_distributor(const std::array<double, 4>& raw,
                               double a_long,
                               double a_trasv,
                               const vehicle::VehicleParameters& params);

}  // namespace iesp::abs
