#pragma once
// Exact expansion of Lambda around u0, the B0..B3 densities, the cut-off
// chi_R, and the gap-versus-distance probe.

#include <optional>
#include <string>

#include "nlslab/functionals.hpp"
#include "nlslab/jet.hpp"

namespace nlslab {

/// chi_R(x) = chi(|x|/R), chi = 1 on [0, 1/2], 0 beyond 3/2, quintic
/// smoothstep in between (C^2, chi(1) = 1/2).
struct CutOff {
  double R = 0.0;
  RealField chi;
  RealField chi_x;
};

/// Throws CutoffOutsideDomain when 3R/2 > L, NotOnGrid when R is not a node.
CutOff make_cutoff(const Grid& g, double R);

struct BDensities {
  RealField b0, b1, b2, b3;
};

/// u, v with derivatives up to 2, eta up to 1.
BDensities b_densities(const RealJet& u, const RealJet& v, const RealJet& eta);

/// Lambda(psi) - Lambda(u0); the reference value is evaluated on the same grid.
double lambda_gap(const ComplexJet& psi);
double lambda_gap(const ComplexField& psi);

/// Integral of the full expansion integrand for psi = u0 + u + iv, cubic terms
/// included. With cubic = false only the quadratic part is kept.
double lambda_expansion_rhs(const RealJet& u, const RealJet& v, bool cubic = true);

/// integral of B1(u) + B2(v) + B3(eta), eta treated as independent.
double q_total(const RealJet& u, const RealJet& v, const RealJet& eta);

/// The cubic/quartic remainder of B3(eta) once its part quadratic in u is
/// taken out: 4m(u0'u + u0 u_x) + 2m^2 + 2c u0 u r + c r^2 / 2 with
/// m = u u_x + v v_x, r = u^2 + v^2, c = 3u0^2 - 2.
RealField n_tilde(const RealJet& u, const RealJet& v);

/// max_j |B1 + B3(eta) - B0 - (2 u0 u0' u^2)_x - N~| with eta = 2 u0 u + u^2 + v^2.
double bident_pointwise_defect(const RealJet& u, const RealJet& v);

/// int (B1(u) + B3(eta)) chi_R - int B0(u) chi_R, eta built from (u, v).
double bident_residual(const RealJet& u, const RealJet& v, double R);
/// -2 int u0 u0' u^2 chi_R': the part of the residual that is quadratic in u.
double bident_quadratic_part(const RealJet& u, double R);

struct ProbeRecord {
  double gap = 0.0;
  double dR = 0.0;
  double dR2 = 0.0;
  std::optional<double> ratio;  // empty when dR == 0
};

ProbeRecord coercivity_probe(const ComplexJet& psi, double R);

std::string probe_csv_header();
std::string probe_csv_row(std::size_t sample_id, std::uint64_t seed, double dR, double rho,
                          double gap, std::optional<double> ratio);

}  // namespace nlslab
