#include "nlslab/error.hpp"

namespace nlslab {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::GridTooSmall: return "GridTooSmall";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::NotOnGrid: return "NotOnGrid";
    case Errc::SpeedOutOfRange: return "SpeedOutOfRange";
    case Errc::CutoffOutsideDomain: return "CutoffOutsideDomain";
    case Errc::ShiftTooLarge: return "ShiftTooLarge";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::SingularB: return "SingularB";
    case Errc::InconsistentPQ: return "InconsistentPQ";
    case Errc::LinearSolveFailure: return "LinearSolveFailure";
    case Errc::ObserverFailure: return "ObserverFailure";
    case Errc::ConfigError: return "ConfigError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace nlslab
