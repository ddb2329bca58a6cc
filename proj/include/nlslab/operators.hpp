#pragma once
// Linearized operators at the black soliton, their quadratic forms, the
// factorizations of the K+ and K- forms, Duhamel reconstructions, banded
// discretizations, spectra and constrained Rayleigh minima.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlslab/banded.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/jet.hpp"

namespace nlslab {

enum class OperatorKind { Lplus, Lminus, Mplus, Mminus, Kplus, Kminus };

std::string_view to_string(OperatorKind k);
OperatorKind parse_operator_kind(std::string_view name);

/// P f = c4 f'''' - (a f')' + b f, with a' sampled analytically.
struct Coefficients {
  double c4 = 0.0;
  RealField a, ax, b;
};

Coefficients coefficients(OperatorKind kind, const Grid& g);

/// Pointwise application. The jet needs order 4 for M and K, 2 for L.
RealField apply(const Coefficients& c, const RealJet& f);
RealField apply(OperatorKind kind, const RealJet& f);
/// Finite-difference derivatives of the samples.
RealField apply(OperatorKind kind, const RealField& f);

/// integral of c4 f_xx^2 + a f_x^2 + b f^2 (jet order >= 2).
double qform(const Coefficients& c, const RealJet& f);
double qform(OperatorKind kind, const RealJet& f);
double qform(OperatorKind kind, const RealField& f);

/// w = u_x + sqrt2 u0 u, one derivative order less than u.
RealJet w_substitution(const RealJet& u);
RealField w_substitution(const RealField& u);

/// p = u0 v_x - u0' v and q = v_xx + (1 - u0^2) v = -L_- v.
struct KminusFactors {
  RealJet p, q;
};
KminusFactors kminus_factors(const RealJet& v);
struct KminusFieldFactors {
  RealField p, q;
};
KminusFieldFactors kminus_factors(const RealField& v);

/// u = A u0' + W with W(x) = sech^2(x/sqrt2) int_0^x cosh^2(y/sqrt2) w(y) dy and
/// A chosen so that <u0', u> = 0.
struct DuhamelU {
  RealField u, W;
  double A = 0.0;
};
DuhamelU reconstruct_u(const RealField& w);

/// v = B u0 + Z with Z = u0 int_0^x (p + sqrt2 q) - sqrt2 p and <u0'', v> = 0.
/// Rejects (InconsistentPQ) inputs with max |p_x - u0 q| above tolerance.
struct DuhamelV {
  RealField v, Z;
  double B = 0.0;
  double consistency = 0.0;
};
DuhamelV reconstruct_v(const RealField& p, const RealField& q, double tolerance = 1e-4);

/// K1 = sup_y int_{|y|}^inf K(x,y) dx and Kinf = sup_x int_0^{|x|} K(x,y) dy for
/// the kernel K(x,y) = cosh^2(y/sqrt2)/cosh^2(x/sqrt2), by quadrature on g.
struct KernelNorms {
  double K1 = 0.0, K1_at = 0.0;
  double Kinf = 0.0, Kinf_at = 0.0;
};
KernelNorms duhamel_kernel_norms(const Grid& g);
/// Closed form of int_0^x K(x,y) dy for x >= 0.
double kinf_profile(double x);

/// Banded discretization on the interior nodes 1..N-2 with homogeneous
/// Dirichlet closure (odd reflection). x^T A x * h approximates qform.
class OperatorMatrix {
 public:
  OperatorMatrix(OperatorKind kind, Grid g, SymBandMatrix a, double symmetry_defect);

  OperatorKind kind() const noexcept { return kind_; }
  const Grid& grid() const noexcept { return grid_; }
  const SymBandMatrix& matrix() const noexcept { return a_; }
  double symmetry_defect() const noexcept { return defect_; }
  std::size_t interior_size() const noexcept { return a_.size(); }

  std::vector<double> restrict_to_interior(const RealField& f) const;
  RealField extend(const std::vector<double>& x) const;
  /// A applied to the interior samples of f; boundary entries are zero.
  RealField multiply(const RealField& f) const;
  double quadratic_form(const RealField& f) const;

 private:
  OperatorKind kind_;
  Grid grid_;
  SymBandMatrix a_;
  double defect_;
};

/// Requires N >= 201.
OperatorMatrix assemble(OperatorKind kind, const Grid& g);
OperatorMatrix assemble(OperatorKind kind, const Coefficients& c, const Grid& g);

struct Eigenpair {
  double value = 0.0;
  RealField vector;  // unit L2 norm, zero at the boundary nodes
  double residual = 0.0;
  double edge_mass = 0.0;
};

struct SpectrumReport {
  OperatorKind kind = OperatorKind::Kplus;
  double half_width = 0.0;
  double matrix_norm = 0.0;
  std::size_t discarded = 0;  // boundary modes dropped by the edge filter
  std::vector<Eigenpair> pairs;
};

/// k lowest eigenpairs after discarding modes with more than 1% of their mass
/// in the outer 5% of the domain.
SpectrumReport spectrum(const OperatorMatrix& m, std::size_t k);

std::string spectrum_csv(const SpectrumReport& r);
std::string eigenvector_csv(const SpectrumReport& r);

enum class NormKind { H2, WeakKminus };
std::string_view to_string(NormKind n);

struct CoercivityResult {
  double value = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;  // unconstrained generalized eigenvalues
  bool constrained = false;
  int evaluations = 0;
};

/// Minimum of qform / norm^2 over the discrete subspace orthogonal to the
/// constraint (or over everything when no constraint is given).
CoercivityResult coercivity_estimate(const OperatorMatrix& m, const RealField* constraint,
                                     NormKind norm);

}  // namespace nlslab
