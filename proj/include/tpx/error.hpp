#pragma once

#include <stdexcept>
#include <string>

namespace tpx {

// Invalid input data or configuration: malformed profiles, bad curves,
// schema violations, out-of-range parameters. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while producing results: subprocess died, unparseable log,
// energy counter fault. Maps to CLI exit code 3.
class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tpx
