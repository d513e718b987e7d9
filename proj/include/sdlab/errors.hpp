#pragma once

#include <stdexcept>
#include <string>

namespace sdlab {

/// Failure category; maps one-to-one onto the CLI exit codes.
enum class ErrorKind {
  config,      // malformed input, schema violations, unsatisfiable config
  numerical,   // an invariant or identity failed beyond tolerance
  convergence  // an iterative solver did not converge
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::numerical: return 3;
    case ErrorKind::convergence: return 4;
  }
  return 1;
}

}  // namespace sdlab
