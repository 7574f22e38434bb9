#pragma once

#include <stdexcept>
#include <string>

namespace galet {

// Requested diagnostic needs a capability (g*, dense Hessian) the problem
// does not provide.
class UnsupportedDiagnostic : public std::runtime_error {
 public:
  explicit UnsupportedDiagnostic(const std::string& what) : std::runtime_error(what) {}
};

// Grid search found no point satisfying the feasibility tolerance.
class NoFeasiblePoint : public std::runtime_error {
 public:
  explicit NoFeasiblePoint(const std::string& what) : std::runtime_error(what) {}
};

// Config file rejected; line is 1-based, 0 when no line applies.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line(line) {}
  int line;
};

}  // namespace galet
