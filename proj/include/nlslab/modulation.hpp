#pragma once
// Decomposition e^{i theta} psi(. + xi) = u0 + u + i v with <u0', u> = 0 and
// <u0'', v> = 0, and the modulation rates (xi', theta') along the flow.

#include <array>
#include <optional>
#include <string>

#include "nlslab/grid.hpp"

namespace nlslab {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// (<u0'(. - xi), Re e^{i theta} psi>, <u0''(. - xi), Im e^{i theta} psi>).
/// Throws ShiftTooLarge for |xi| > L/2.
Vec2 f_residual(const ComplexField& psi, double xi, double theta);
/// Analytic Jacobian of f_residual with respect to (xi, theta).
Mat2 f_jacobian(const ComplexField& psi, double xi, double theta);

struct ModulationOptions {
  int max_iterations = 25;
  double tolerance = 1e-12;
  double neighborhood = 0.5;  // largest modulated d_R accepted
  double R = 10.0;
};

struct ModulationState {
  double xi = 0.0;
  double theta = 0.0;  // in (-pi, pi]
  RealField u, v;
  int iterations = 0;
  double residual = 0.0;     // max |f| at the returned point
  double distance = 0.0;     // d_R(u0 + u + iv, u0)
};

/// e^{i theta} psi(. + xi) - u0 split into (u, v); psi is shifted by 8-point
/// Lagrange interpolation.
std::pair<RealField, RealField> decompose(const ComplexField& psi, double xi, double theta);

/// Damped Newton on f_residual starting from (xi0, theta0).
ModulationState solve_modulation(const ComplexField& psi, double xi0 = 0.0, double theta0 = 0.0,
                                 const ModulationOptions& opt = {});

struct RateSystem {
  Mat2 B{};
  Vec2 rhs{};
  Vec2 rates{};  // (xi', theta')
};

/// Rates for the rotating-frame flow. Throws SingularB when |det B| < 1e-6.
RateSystem modulation_rates(const RealField& u, const RealField& v);
inline RateSystem modulation_rates(const ModulationState& s) { return modulation_rates(s.u, s.v); }

/// One tracker per trajectory: previous (xi, theta) seed the next solve and
/// theta is unwrapped so that it is continuous in time.
class ModulationTracker {
 public:
  explicit ModulationTracker(ModulationOptions opt = {}) : opt_(opt) {}

  struct Record {
    double t = 0.0;
    double xi = 0.0, theta = 0.0;
    double xidot = 0.0, thetadot = 0.0;
    double dR_modulated = 0.0;
    int iterations = 0;
  };

  Record observe(double t, const ComplexField& phi);
  const std::optional<ModulationState>& last_state() const noexcept { return last_; }

  static std::string csv_header();
  static std::string csv_row(const Record& r);

 private:
  ModulationOptions opt_;
  double xi_ = 0.0, theta_ = 0.0, unwrapped_ = 0.0;
  bool started_ = false;
  std::optional<ModulationState> last_;
};

}  // namespace nlslab
