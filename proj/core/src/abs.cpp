#include "iesp/abs.hpp"

#include <algorithm>

#include "iesp/errors.hpp"

namespace iesp::abs {

BrakeModulator::BrakeModulator(fuzzy::RuleBase rules, double max_torque)
    : rules_(std::move(rules)), max_torque_(max_torque) {
    if (rules_.inputs().size() != 2)
        throw ConfigError("ABS rule base needs two inputs (slip, slip rate)");
    if (!(max_torque_ > 0.0))
        throw ConfigError("ABS: max torque must be positive");
    for (const auto& c : rules_.consequents()) {
        if (c.value < 0.0 || c.value > 1.0)
            throw ConfigError("ABS: multiplier constants must lie in [0, 1]");
    }
}

double BrakeModulator::multiplier(double sigma, double sigma_rate) const {
    // Braking slip magnitude; rate is positive while the wheel heads toward lock.
    const double slip = std::max(0.0, -sigma);
    const double rate = -sigma_rate;
    return std::clamp(rules_.evaluate(slip, rate), 0.0, 1.0);
}

std::array<double, 4> BrakeModulator::modulate(const BrakeDemand& demand) const {
    const double pedal = std::clamp(demand.pedal, 0.0, 1.0);
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double wanted = pedal * max_torque_ + std::max(0.0, demand.iesp_delta[i]);
        if (wanted <= 0.0)
            continue;
        out[i] = wanted * multiplier(demand.sigma[i], demand.sigma_rate[i]);
    }
    return out;
}

BrakeCommand brake_distributor(const std::array<double, 4>& raw,
                               double a_long,
                               double a_trasv,
                               const vehicle::VehicleParameters& params) {
    const auto loads = vehicle::vertical_loads(params, a_long, a_trasv);
    const double total = loads.total();
    BrakeCommand cmd;
    cmd.lifted = loads.lifted;
    if (!(total > 0.0))
        return cmd;
    for (std::size_t i = 0; i < 4; ++i) {
        const double share = 4.0 * loads.load[i] / total;
        cmd.torque[i] = std::clamp(raw[i] * share, 0.0, params.brake_max_torque);
    }
    return cmd;
}

}  // namespace iesp::abs
