#pragma once

#include <stdexcept>
#include <string>

namespace longfd {

// Configuration / input errors (bad files, bad values). CLI exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (blowup, singular equilibrium, violated precondition).
// CLI exit code 3.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class SingularityError : public NumericalError {
  public:
    explicit SingularityError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace longfd
