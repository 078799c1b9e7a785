#pragma once

#include <string_view>

#include "iesp/fuzzy.hpp"

namespace iesp::rules {

// JSON text of the shipped rule bases (core/data/rules).
std::string_view autopilot_json();
std::string_view abs_modulator_json();
std::string_view delta_m_yaw_json();
std::string_view torque_cut_json();

fuzzy::RuleBase default_autopilot();
fuzzy::RuleBase default_abs_modulator();
fuzzy::RuleBase default_delta_m_yaw();
fuzzy::RuleBase default_torque_cut();

}  // namespace iesp::rules
