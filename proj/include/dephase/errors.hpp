#pragma once

#include <stdexcept>
#include <string>

namespace dephase {

enum class ErrorKind {
  Domain,             // invalid argument for a mathematical operation
  UnsupportedRegime,  // parameters outside the solver's validity range
  Numerical,          // quadrature, stepper or overflow failure
  Resource,           // requested work exceeds a configured cap
  Config              // malformed user configuration
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace dephase
