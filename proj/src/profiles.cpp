#include "nlslab/profiles.hpp"

#include <array>
#include <cmath>
#include <string>

namespace nlslab {
namespace {

// Derivative n >= 1 of tanh(y) is sech^2(y) * Q_n(tanh y) with
// Q_1 = 1, Q_{n+1} = -2 t Q_n + (1 - t^2) Q_n'.
constexpr int kMaxOrder = 6;
using Poly = std::array<double, kMaxOrder + 2>;

std::array<Poly, kMaxOrder + 1> build_tables() {
  std::array<Poly, kMaxOrder + 1> q{};
  q[1][0] = 1.0;
  for (int n = 1; n < kMaxOrder; ++n) {
    Poly next{};
    const Poly& p = q[static_cast<std::size_t>(n)];
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      next[i + 1] += -2.0 * p[i];
      if (i >= 1) {
        next[i - 1] += static_cast<double>(i) * p[i];
        next[i + 1] -= static_cast<double>(i) * p[i];
      }
    }
    q[static_cast<std::size_t>(n) + 1] = next;
  }
  return q;
}

const std::array<Poly, kMaxOrder + 1>& tables() {
  static const auto t = build_tables();
  return t;
}

double horner(const Poly& p, double t) {
  double s = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) s = s * t + p[i];
  return s;
}

}  // namespace

double tanh_derivative(double x, int k, double a, double kappa) {
  if (k < 0 || k > kMaxOrder) raise(Errc::InvalidArgument, "derivative order out of range");
  const double y = kappa * x;
  const double t = std::tanh(y);
  if (k == 0) return a * t;
  const double c = std::cosh(y);
  const double sech2 = std::isfinite(c) ? 1.0 / (c * c) : 0.0;
  return a * std::pow(kappa, k) * sech2 * horner(tables()[static_cast<std::size_t>(k)], t);
}

RealJet SolitonBundle::jet(int order) const {
  if (order < 0 || order > 4) raise(Errc::InvalidArgument, "bundle jets go up to order 4");
  std::vector<RealField> d{u0, u0p, u0pp, u0ppp, u0pppp};
  d.resize(static_cast<std::size_t>(order) + 1, RealField(grid));
  return RealJet(std::move(d));
}

RealField sample_u0(const Grid& g, int k, double shift) {
  return RealField::sample(g, [&](double x) { return u0_derivative(x - shift, k); });
}

RealJet u0_jet(const Grid& g, int order, double shift) {
  std::vector<RealField> d;
  for (int k = 0; k <= order; ++k) d.push_back(sample_u0(g, k, shift));
  return RealJet(std::move(d));
}

SolitonBundle black_soliton(const Grid& g) {
  return SolitonBundle{g, sample_u0(g, 0), sample_u0(g, 1), sample_u0(g, 2), sample_u0(g, 3),
                       sample_u0(g, 4)};
}

ComplexJet dark_soliton_jet(const Grid& g, double nu, int order, double shift) {
  if (!(std::abs(nu) < kSqrt2))
    raise(Errc::SpeedOutOfRange, "|nu| must be below sqrt(2), got " + std::to_string(nu));
  const double a = std::sqrt(1.0 - 0.5 * nu * nu);
  const double kappa = std::sqrt(0.5 - 0.25 * nu * nu);
  std::vector<ComplexField> d;
  for (int k = 0; k <= order; ++k) {
    const double im = k == 0 ? nu / kSqrt2 : 0.0;
    d.push_back(ComplexField::sample(
        g, [&](double x) { return cplx(tanh_derivative(x - shift, k, a, kappa), im); }));
  }
  return ComplexJet(std::move(d));
}

ComplexField dark_soliton(const Grid& g, double nu) { return dark_soliton_jet(g, nu, 0).value(); }

double travelling_residual(const ComplexField& phi, double nu) {
  const ComplexField d1 = diff(phi, 1);
  const ComplexField d2 = diff(phi, 2);
  const cplx I(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const cplx r = d2[j] + (1.0 - std::norm(phi[j])) * phi[j] - I * nu * d1[j];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace nlslab
