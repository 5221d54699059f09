#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edmp {

enum class ErrorKind {
  InvalidInput,
  NumericalFailure,
  NotAnEdm,
  NotUnitSpherical,
  ParallelVectors,
  DegenerateDenominator,
  PreconditionViolated,
  OutsideTleq,
  PoleAt,
  InfeasibleSpec,
  Infeasible,
  IndexOutOfRange,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace edmp
