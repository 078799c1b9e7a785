#include "iesp/errors.hpp"

namespace iesp {

namespace {

std::string join(const std::vector<std::string>& issues) {
    std::string out = "scenario validation failed";
    for (const auto& i : issues)
        out += "\n  " + i;
    return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : ConfigError(join(issues)), issues_(std::move(issues)) {}

SimulationFault::SimulationFault(const std::string& what, double time_s)
    : std::runtime_error(what + " at t = " + std::to_string(time_s) + " s"), time_s_(time_s) {}

}  // namespace iesp
