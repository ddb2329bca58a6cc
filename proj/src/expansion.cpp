#include "nlslab/expansion.hpp"

#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "nlslab/profiles.hpp"

namespace nlslab {

CutOff make_cutoff(const Grid& g, double R) {
  if (!(R > 0.0)) raise(Errc::InvalidArgument, "cut-off radius must be positive");
  if (1.5 * R > g.half_width())
    raise(Errc::CutoffOutsideDomain,
          fmt::format("3R/2 = {} exceeds the half width {}", 1.5 * R, g.half_width()));
  g.index_of(R);
  CutOff c{R, RealField(g), RealField(g)};
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.x(j);
    const double t = std::clamp(std::abs(x) / R - 0.5, 0.0, 1.0);
    const double t3 = t * t * t;
    c.chi[j] = 1.0 - t3 * (10.0 - 15.0 * t + 6.0 * t * t);
    const double ds = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    c.chi_x[j] = -(x < 0 ? -1.0 : 1.0) * ds / R;
  }
  return c;
}

BDensities b_densities(const RealJet& u, const RealJet& v, const RealJet& eta) {
  u.require(2);
  v.require(2);
  eta.require(1);
  const Grid& g = u.grid();
  const RealField u0 = sample_u0(g, 0);
  BDensities b{RealField(g), RealField(g), RealField(g), RealField(g)};
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double s = u0[j] * u0[j];
    const double U = u[0][j], Ux = u[1][j], Uxx = u[2][j];
    const double V = v[0][j], Vx = v[1][j], Vxx = v[2][j];
    b.b0[j] = Uxx * Uxx + (5 * s - 2) * Ux * Ux - (1 - 3 * s) * U * U - (1 - s) * (1 - 5 * s) * U * U;
    b.b1[j] = Uxx * Uxx + (3 * s - 2) * Ux * Ux + (1 - s) * U * U - 3 * (1 - s) * (1 - 3 * s) * U * U;
    b.b2[j] = Vxx * Vxx + (3 * s - 2) * Vx * Vx + (1 - s) * V * V;
    b.b3[j] = 0.5 * eta[1][j] * eta[1][j] + 0.5 * (3 * s - 2) * eta[0][j] * eta[0][j];
  }
  return b;
}

namespace {

double lambda_of_soliton(const Grid& g) {
  static thread_local std::optional<std::pair<Grid, double>> cache;
  if (!cache || !(cache->first == g)) cache.emplace(g, conserved(to_complex(u0_jet(g, 2))).Lambda);
  return cache->second;
}

}  // namespace

double lambda_gap(const ComplexJet& psi) {
  return conserved(psi).Lambda - lambda_of_soliton(psi.grid());
}

double lambda_gap(const ComplexField& psi) {
  const Grid& g = psi.grid();
  return conserved(psi).Lambda - conserved(make_complex(sample_u0(g, 0), RealField(g))).Lambda;
}

double lambda_expansion_rhs(const RealJet& u, const RealJet& v, bool cubic) {
  u.require(2);
  v.require(2);
  const Grid& g = u.grid();
  const RealField u0 = sample_u0(g, 0), u0p = sample_u0(g, 1);
  RealField d(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double s = u0[j] * u0[j];
    const double U = u[0][j], Ux = u[1][j], Uxx = u[2][j];
    const double V = v[0][j], Vx = v[1][j], Vxx = v[2][j];
    const double r2 = U * U + V * V, g2 = Ux * Ux + Vx * Vx;
    const double eta = 2 * u0[j] * U + r2;
    const double eta_x = 2 * (u0p[j] * U + u0[j] * Ux + U * Ux + V * Vx);
    double q = Uxx * Uxx + Vxx * Vxx + (3 * s - 2) * g2 + (1 - s) * r2 -
               3 * (1 - s) * (1 - 3 * s) * U * U + 0.5 * eta_x * eta_x +
               0.5 * (3 * s - 2) * eta * eta;
    if (cubic) q += 0.5 * eta * eta * eta + 3 * eta * g2 + 6 * u0p[j] * r2 * Ux;
    d[j] = q;
  }
  return integrate(d);
}

double q_total(const RealJet& u, const RealJet& v, const RealJet& eta) {
  const BDensities b = b_densities(u, v, eta);
  return integrate(b.b1) + integrate(b.b2) + integrate(b.b3);
}

RealField n_tilde(const RealJet& u, const RealJet& v) {
  u.require(1);
  v.require(1);
  const Grid& g = u.grid();
  const RealField u0 = sample_u0(g, 0), u0p = sample_u0(g, 1);
  RealField n(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double U = u[0][j], Ux = u[1][j], V = v[0][j], Vx = v[1][j];
    const double m = U * Ux + V * Vx, r2 = U * U + V * V, c = 3 * u0[j] * u0[j] - 2;
    n[j] = 4 * m * (u0p[j] * U + u0[j] * Ux) + 2 * m * m + 2 * c * u0[j] * U * r2 + 0.5 * c * r2 * r2;
  }
  return n;
}

double bident_pointwise_defect(const RealJet& u, const RealJet& v) {
  const Grid& g = u.grid();
  const RealJet eta = eta_of(u0_jet(g, 2), u, v);
  const BDensities b = b_densities(u, v, eta);
  const RealField nt = n_tilde(u, v);
  const RealField u0 = sample_u0(g, 0), u0p = sample_u0(g, 1), u0pp = sample_u0(g, 2);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double U = u[0][j], Ux = u[1][j];
    const double flux_x = 2 * (u0p[j] * u0p[j] + u0[j] * u0pp[j]) * U * U + 4 * u0[j] * u0p[j] * U * Ux;
    worst = std::max(worst, std::abs(b.b1[j] + b.b3[j] - b.b0[j] - flux_x - nt[j]));
  }
  return worst;
}

double bident_residual(const RealJet& u, const RealJet& v, double R) {
  const Grid& g = u.grid();
  const CutOff c = make_cutoff(g, R);
  const RealJet eta = eta_of(u0_jet(g, 2), u, v);
  const BDensities b = b_densities(u, v, eta);
  RealField d(g);
  for (std::size_t j = 0; j < g.size(); ++j) d[j] = (b.b1[j] + b.b3[j] - b.b0[j]) * c.chi[j];
  return integrate(d);
}

double bident_quadratic_part(const RealJet& u, double R) {
  const Grid& g = u.grid();
  const CutOff c = make_cutoff(g, R);
  const RealField u0 = sample_u0(g, 0), u0p = sample_u0(g, 1);
  RealField d(g);
  for (std::size_t j = 0; j < g.size(); ++j)
    d[j] = -2.0 * u0[j] * u0p[j] * u[0][j] * u[0][j] * c.chi_x[j];
  return integrate(d);
}

ProbeRecord coercivity_probe(const ComplexJet& psi, double R) {
  const Grid& g = psi.grid();
  ProbeRecord r;
  r.gap = lambda_gap(psi);
  r.dR = distance_dR(psi, to_complex(u0_jet(g, 2)), R);
  r.dR2 = r.dR * r.dR;
  if (r.dR > 0.0) r.ratio = r.gap / r.dR2;
  return r;
}

std::string probe_csv_header() { return "sample_id,seed,dR,rho,gap,ratio"; }

std::string probe_csv_row(std::size_t sample_id, std::uint64_t seed, double dR, double rho,
                          double gap, std::optional<double> ratio) {
  return fmt::format("{},{},{:.17g},{:.17g},{:.17g},{}", sample_id, seed, dR, rho, gap,
                     ratio ? fmt::format("{:.17g}", *ratio) : std::string("null"));
}

}  // namespace nlslab
