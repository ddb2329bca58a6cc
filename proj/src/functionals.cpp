#include "nlslab/functionals.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nlslab/profiles.hpp"

namespace nlslab {
namespace {

constexpr double kBoundaryTolerance = 1e-6;

ConservedSet conserved_from(const ComplexField& psi, const ComplexField& px,
                            const ComplexField& pxx) {
  const Grid& g = psi.grid();
  RealField q(g), m(g), e(g), s(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double r2 = std::norm(psi[j]);
    const double gap = 1.0 - r2;
    const double dx2 = std::norm(px[j]);
    const cplx cross = std::conj(psi[j]) * px[j];
    const double re2 = 2.0 * cross.real();
    q[j] = r2 - 1.0;
    m[j] = -cross.imag();
    e[j] = dx2 + 0.5 * gap * gap;
    s[j] = std::norm(pxx[j]) + 3.0 * r2 * dx2 + 0.5 * re2 * re2 + gap * gap * (1.0 + 0.5 * r2);
  }
  ConservedSet c;
  c.Q = integrate(q);
  c.M = integrate(m);
  c.E = integrate(e);
  c.S = integrate(s);
  c.Lambda = c.S - 2.0 * c.E;
  c.boundary_warning = std::abs(std::abs(psi.front()) - 1.0) > kBoundaryTolerance ||
                       std::abs(std::abs(psi.back()) - 1.0) > kBoundaryTolerance;
  return c;
}

double window_l2(const ComplexField& d, double R) {
  return integrate_window(abs2(d), -R, R);
}

double dR_from(const ComplexField& d1, const ComplexField& d2, const ComplexField& dx,
               const ComplexField& dxx, double R) {
  if (!(R >= 1.0)) raise(Errc::InvalidArgument, "R must be at least 1");
  RealField mod(d1.grid());
  for (std::size_t j = 0; j < mod.size(); ++j) mod[j] = std::norm(d1[j]) - std::norm(d2[j]);
  const double h1 = std::sqrt(norm2(dx) + norm2(dxx));
  const double l2mod = std::sqrt(norm2(mod));
  return h1 + l2mod + std::sqrt(window_l2(d1 - d2, R));
}

}  // namespace

ConservedSet conserved(const ComplexJet& psi) {
  if (psi.order() < 2) raise(Errc::InvalidArgument, "conserved() needs second derivatives");
  return conserved_from(psi.value(), psi[1], psi[2]);
}

ConservedSet conserved(const ComplexField& psi) {
  return conserved_from(psi, diff(psi, 1), diff(psi, 2));
}

double distance_dR(const ComplexJet& psi1, const ComplexJet& psi2, double R) {
  psi1.require(2);
  psi2.require(2);
  return dR_from(psi1.value(), psi2.value(), psi1[1] - psi2[1], psi1[2] - psi2[2], R);
}

double distance_dR(const ComplexField& psi1, const ComplexField& psi2, double R) {
  const ComplexField d = psi1 - psi2;
  return dR_from(psi1, psi2, diff(d, 1), diff(d, 2), R);
}

RealJet eta_of(const RealJet& u0, const RealJet& u, const RealJet& v) {
  RealJet two_u0_plus_u = u0 * 2.0 + u;
  return product(two_u0_plus_u, u) + product(v, v);
}

PerturbationTriple PerturbationTriple::from_uv(const RealJet& u, const RealJet& v) {
  const int order = std::min(u.order(), v.order());
  return PerturbationTriple{u, v, eta_of(u0_jet(u.grid(), order), u, v)};
}

double rho(const PerturbationTriple& p, double R) {
  p.u.require(2);
  p.v.require(2);
  p.eta.require(1);
  const Grid& g = p.u.grid();
  if (!(R >= 1.0)) raise(Errc::InvalidArgument, "R must be at least 1");
  const std::size_t il = g.index_of(-R);
  const std::size_t ir = g.index_of(R);
  RealField all(g), inner_part(g), outer(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double ux = p.u[1][j], uxx = p.u[2][j], vx = p.v[1][j], vxx = p.v[2][j];
    all[j] = uxx * uxx + vxx * vxx + ux * ux + vx * vx;
    inner_part[j] = p.u[0][j] * p.u[0][j] + p.v[0][j] * p.v[0][j] / (R * R);
    outer[j] = p.eta[1][j] * p.eta[1][j] + p.eta[0][j] * p.eta[0][j];
  }
  double s = integrate(all) + integrate_between(inner_part, il, ir);
  if (il > 0) s += integrate_between(outer, 0, il) + integrate_between(outer, ir, g.size() - 1);
  return std::sqrt(std::max(0.0, s));
}

std::string conserved_csv_header() { return "t,Q,M,E,S,Lambda"; }

std::string conserved_csv_row(double t, const ConservedSet& c) {
  return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", t, c.Q, c.M, c.E, c.S,
                     c.Lambda);
}

}  // namespace nlslab
