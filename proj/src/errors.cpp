#include "edmp/errors.hpp"

namespace edmp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NotAnEdm: return "NotAnEdm";
    case ErrorKind::NotUnitSpherical: return "NotUnitSpherical";
    case ErrorKind::ParallelVectors: return "ParallelVectors";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::OutsideTleq: return "OutsideTleq";
    case ErrorKind::PoleAt: return "PoleAt";
    case ErrorKind::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace edmp
