#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace iesp {

// Malformed rule base, parameter block or scenario.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A scenario file that failed validation. Carries every issue found, each
// prefixed with its location inside the document.
class ValidationError : public ConfigError {
  public:
    explicit ValidationError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

  private:
    std::vector<std::string> issues_;
};

// Non-finite state or a singular configuration reached during integration.
class SimulationFault : public std::runtime_error {
  public:
    SimulationFault(const std::string& what, double time_s);
    double time() const { return time_s_; }

  private:
    double time_s_;
};

// Output files that could not be written; the message names the path.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace iesp
