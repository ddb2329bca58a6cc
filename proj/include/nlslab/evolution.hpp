#pragma once
// Time stepping of i phi_t + phi_xx + (1 - |phi|^2) phi = 0 with pinned
// boundary values, plus the observer plumbing for long runs.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlslab/functionals.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/modulation.hpp"

namespace nlslab {

/// phi = e^{it} psi and back.
ComplexField to_rotating_frame(const ComplexField& psi, double t);
ComplexField from_rotating_frame(const ComplexField& phi, double t);

/// max |phi_xx + (1 - |phi|^2) phi| over the grid (8th-order differences).
double stationary_residual(const ComplexField& phi);

enum class Scheme {
  Midpoint,  // implicit CN with the conservative midpoint nonlinearity, 4th-order Laplacian
  Strang,    // exact phase half-steps around a 2nd-order CN linear step
};
std::string to_string(Scheme s);

enum class Boundary {
  Pinned,      // Dirichlet values held at their initial values, odd ghost reflection
  Reflecting,  // phi_x = 0, even ghost reflection; conserves mass and energy
};
std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& s);
Scheme parse_scheme(const std::string& s);

/// phi -> phi e^{i tau (1 - |phi|^2)}; the exact nonlinear flow for time tau.
ComplexField nonlinear_substep(const ComplexField& phi, double tau);

/// Factorizes the linear part once for a grid and dt; reusable across steps.
class Stepper {
 public:
  Stepper(const Grid& g, double dt, Scheme scheme = Scheme::Midpoint,
          Boundary boundary = Boundary::Reflecting);
  ComplexField step(const ComplexField& phi) const;
  double dt() const noexcept { return dt_; }
  Scheme scheme() const noexcept { return scheme_; }
  Boundary boundary() const noexcept { return boundary_; }
  /// Fixed-point iterations used by the last Midpoint step.
  int last_iterations() const noexcept { return last_iterations_; }

 private:
  struct Impl;
  Grid grid_;
  double dt_;
  Scheme scheme_;
  Boundary boundary_;
  std::shared_ptr<const Impl> impl_;
  mutable int last_iterations_ = 0;
};

/// One step. Requires ||phi(+-L)| - 1| <= 1e-6.
ComplexField step(const ComplexField& phi, double dt, Scheme scheme = Scheme::Midpoint,
                  Boundary boundary = Boundary::Reflecting);

struct SimConfig {
  double L = 40.0;
  std::size_t N = 4001;
  double dt = 0.0;  // 0 means h; negative runs backwards
  double T = 20.0;
  double t0 = 0.0;
  int cadence = 25;
  Boundary boundary = Boundary::Reflecting;
  Scheme scheme = Scheme::Midpoint;
  double R = 10.0;
  bool keep_snapshots = false;
  bool observe_conserved = true;
  bool observe_distance = true;
  bool observe_modulation = false;

  Grid grid() const { return Grid(L, N); }
  double resolved_dt() const;
  std::size_t steps() const;
  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// Extra per-stamp hook; an exception inside becomes ObserverFailure.
using Observer = std::function<void(std::size_t stamp, double t, const ComplexField& phi)>;

struct Trajectory {
  std::vector<double> t;
  std::vector<std::size_t> step_index;
  std::vector<ComplexField> snapshots;
  std::vector<ConservedSet> conserved;
  std::vector<double> dR;
  std::vector<ModulationTracker::Record> modulation;
  std::optional<ComplexField> final_state;

  std::size_t stamps() const noexcept { return t.size(); }
};

Trajectory evolve(const ComplexField& phi0, const SimConfig& cfg,
                  const std::vector<Observer>& observers = {});

/// Largest relative change of E, S, Lambda, Q against the first stamp;
/// Lambda is measured against 1 + |Lambda|.
struct Drift {
  double E = 0, S = 0, Lambda = 0, Q = 0;
  double max() const { return std::max({E, S, Lambda, Q}); }
};
Drift conservation_drift(const Trajectory& tr);

/// "x,re_phi,im_phi" followed by one row per node.
std::string snapshot_csv(const ComplexField& phi);

}  // namespace nlslab
