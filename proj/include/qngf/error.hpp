#pragma once

#include <stdexcept>
#include <string>

namespace qngf {

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  invalid_input,
  invalid_parameter,
  numerical_failure,
  singular_design,
  coupling_too_strong,
  physicality_violation,
  insufficient_data,
  empty_output,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Eigen-solver failure; carries the residual that tripped the check.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : Error(ErrorKind::numerical_failure, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace qngf
