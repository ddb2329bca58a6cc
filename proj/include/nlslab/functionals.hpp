#pragma once
// Conserved quantities Q, M, E, S, Lambda = S - 2E, the distance d_R and the
// weighted size rho of a perturbation (u, v, eta).

#include <string>

#include "nlslab/grid.hpp"
#include "nlslab/jet.hpp"

namespace nlslab {

struct ConservedSet {
  double Q = 0.0;
  double M = 0.0;  // plain integral over [-L, L], not renormalized
  double E = 0.0;
  double S = 0.0;
  double Lambda = 0.0;
  bool boundary_warning = false;
};

/// Exact integrands with the jet's derivatives. Needs order >= 2.
ConservedSet conserved(const ComplexJet& psi);
/// Same, derivatives by finite differences.
ConservedSet conserved(const ComplexField& psi);

/// ||(psi1-psi2)_x||_{H1} + || |psi1|^2 - |psi2|^2 ||_{L2} + ||psi1-psi2||_{L2(-R,R)}.
double distance_dR(const ComplexJet& psi1, const ComplexJet& psi2, double R);
double distance_dR(const ComplexField& psi1, const ComplexField& psi2, double R);

/// u, v carry derivatives up to 2; eta = 2 u0 u + u^2 + v^2 up to 1.
struct PerturbationTriple {
  RealJet u;
  RealJet v;
  RealJet eta;

  /// eta is built from u, v and the black soliton.
  static PerturbationTriple from_uv(const RealJet& u, const RealJet& v);
};

/// eta = 2 u0 u + u^2 + v^2 with derivatives (order of the inputs).
RealJet eta_of(const RealJet& u0, const RealJet& u, const RealJet& v);

double rho(const PerturbationTriple& p, double R);

/// CSV header and row, fixed formatting.
std::string conserved_csv_header();
std::string conserved_csv_row(double t, const ConservedSet& c);

}  // namespace nlslab
