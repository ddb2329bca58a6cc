#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlslab {

enum class Errc {
  InvalidGrid,
  GridTooSmall,
  GridMismatch,
  NotOnGrid,
  SpeedOutOfRange,
  CutoffOutsideDomain,
  ShiftTooLarge,
  NoConvergence,
  SingularB,
  InconsistentPQ,
  LinearSolveFailure,
  ObserverFailure,
  ConfigError,
  InvalidArgument,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& what);

}  // namespace nlslab
