#include "nlslab/modulation.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nlslab/functionals.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab {
namespace {

void check_shift(const Grid& g, double xi) {
  if (!(std::abs(xi) <= 0.5 * g.half_width()))
    raise(Errc::ShiftTooLarge, fmt::format("|xi| = {} exceeds L/2 = {}", std::abs(xi), 0.5 * g.half_width()));
}

// Re and Im of e^{i theta} psi.
std::pair<RealField, RealField> rotated(const ComplexField& psi, double theta) {
  const cplx e = std::polar(1.0, theta);
  RealField re(psi.grid()), im(psi.grid());
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const cplx z = e * psi[j];
    re[j] = z.real();
    im[j] = z.imag();
  }
  return {re, im};
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a == -std::numbers::pi ? std::numbers::pi : a;
}

}  // namespace

Vec2 f_residual(const ComplexField& psi, double xi, double theta) {
  const Grid& g = psi.grid();
  check_shift(g, xi);
  const auto [re, im] = rotated(psi, theta);
  return {inner(sample_u0(g, 1, xi), re), inner(sample_u0(g, 2, xi), im)};
}

Mat2 f_jacobian(const ComplexField& psi, double xi, double theta) {
  const Grid& g = psi.grid();
  check_shift(g, xi);
  const auto [re, im] = rotated(psi, theta);
  const RealField p1 = sample_u0(g, 1, xi), p2 = sample_u0(g, 2, xi), p3 = sample_u0(g, 3, xi);
  Mat2 j;
  j[0] = {-inner(p2, re), -inner(p1, im)};
  j[1] = {-inner(p3, im), inner(p2, re)};
  return j;
}

std::pair<RealField, RealField> decompose(const ComplexField& psi, double xi, double theta) {
  const Grid& g = psi.grid();
  auto [u, v] = rotated(shifted(psi, xi), theta);
  u -= sample_u0(g, 0);
  return {u, v};
}

ModulationState solve_modulation(const ComplexField& psi, double xi0, double theta0,
                                 const ModulationOptions& opt) {
  const Grid& g = psi.grid();
  double xi = xi0, theta = theta0;
  Vec2 f = f_residual(psi, xi, theta);
  int it = 0;
  auto size = [](const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); };
  while (size(f) > opt.tolerance) {
    if (it == opt.max_iterations)
      raise(Errc::NoConvergence,
            fmt::format("modulation Newton: |f| = {:.3e} after {} iterations", size(f), it));
    ++it;
    const Mat2 J = f_jacobian(psi, xi, theta);
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (!(std::abs(det) > 1e-14))
      raise(Errc::NoConvergence, "modulation Newton: singular Jacobian");
    double dxi = -(J[1][1] * f[0] - J[0][1] * f[1]) / det;
    double dth = -(-J[1][0] * f[0] + J[0][0] * f[1]) / det;
    while (std::abs(dxi) > 1.0 || std::abs(dth) > 0.5) {
      dxi *= 0.5;
      dth *= 0.5;
    }
    const double xi_next = xi + dxi;
    if (std::abs(xi_next) > 0.5 * g.half_width())
      raise(Errc::NoConvergence, "modulation Newton left the admissible shift range");
    const bool stalled = std::abs(dxi) < 1e-15 && std::abs(dth) < 1e-15;
    xi = xi_next;
    theta += dth;
    f = f_residual(psi, xi, theta);
    if (stalled) break;
  }
  if (size(f) > std::max(opt.tolerance, 1e-10))
    raise(Errc::NoConvergence, fmt::format("modulation Newton stalled at |f| = {:.3e}", size(f)));

  const double th = wrap_angle(theta);
  auto [u, v] = decompose(psi, xi, th);
  ModulationState s{xi, th, std::move(u), std::move(v), it, size(f), 0.0};
  const ComplexField base = make_complex(sample_u0(g, 0), RealField(g));
  s.distance = distance_dR(base + make_complex(s.u, s.v), base, opt.R);
  if (s.distance > opt.neighborhood)
    raise(Errc::NoConvergence,
          fmt::format("modulated distance {:.3g} is outside the neighbourhood {:.3g}", s.distance,
                      opt.neighborhood));
  return s;
}

RateSystem modulation_rates(const RealField& u, const RealField& v) {
  u.check(v);
  const Grid& g = u.grid();
  const RealField u0 = sample_u0(g, 0), p1 = sample_u0(g, 1), p2 = sample_u0(g, 2),
                  p3 = sample_u0(g, 3), p4 = sample_u0(g, 4);
  const double n2 = kU0pNorm2;
  RealField lm(g), lp(g), nl1(g), nl2(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double s = u0[j] * u0[j];
    lm[j] = -p3[j] + (s - 1.0) * p1[j];        // L_- u0'
    lp[j] = -p4[j] + (3.0 * s - 1.0) * p2[j];  // L_+ u0''
    const double U = u[j], V = v[j], r2 = U * U + V * V;
    const double eta = 2.0 * u0[j] * U + r2;
    nl1[j] = p1[j] * eta * V;
    nl2[j] = p2[j] * ((3.0 * u0[j] * U + r2) * U + u0[j] * V * V);
  }
  RateSystem r;
  // <u0', u_x> = -<u0'', u> and <u0'', v_x> = -<u0''', v>
  r.B[0] = {-n2 + inner(p2, u), inner(p1, v)};
  r.B[1] = {-inner(p3, v), -n2 + inner(p2, u)};
  r.rhs = {inner(lm, v) + integrate(nl1), inner(lp, u) + integrate(nl2)};
  const double det = r.B[0][0] * r.B[1][1] - r.B[0][1] * r.B[1][0];
  if (std::abs(det) < 1e-6) raise(Errc::SingularB, fmt::format("|det B| = {:.3e}", std::abs(det)));
  r.rates = {(r.B[1][1] * r.rhs[0] - r.B[0][1] * r.rhs[1]) / det,
             (-r.B[1][0] * r.rhs[0] + r.B[0][0] * r.rhs[1]) / det};
  return r;
}

ModulationTracker::Record ModulationTracker::observe(double t, const ComplexField& phi) {
  ModulationState s = solve_modulation(phi, xi_, theta_, opt_);
  if (!started_) {
    unwrapped_ = s.theta;
    started_ = true;
  } else {
    unwrapped_ += wrap_angle(s.theta - theta_);
  }
  xi_ = s.xi;
  theta_ = s.theta;
  const RateSystem rs = modulation_rates(s);
  Record r;
  r.t = t;
  r.xi = s.xi;
  r.theta = unwrapped_;
  r.xidot = rs.rates[0];
  r.thetadot = rs.rates[1];
  r.dR_modulated = s.distance;
  r.iterations = s.iterations;
  last_ = std::move(s);
  return r;
}

std::string ModulationTracker::csv_header() { return "t,xi,theta,xidot,thetadot,dR_modulated"; }

std::string ModulationTracker::csv_row(const Record& r) {
  return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", r.t, r.xi, r.theta, r.xidot,
                     r.thetadot, r.dR_modulated);
}

}  // namespace nlslab
