#include "nlslab/random_fields.hpp"

#include <algorithm>
#include <cmath>

#include "nlslab/profiles.hpp"

namespace nlslab {

double uniform(std::mt19937_64& rng, double a, double b) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return a + (b - a) * u;
}

RealJet gaussian_jet(const Grid& g, const Bump& b, int order) {
  if (order < 0 || order > 4) raise(Errc::InvalidArgument, "gaussian jets go up to order 4");
  std::vector<RealField> d(static_cast<std::size_t>(order) + 1, RealField(g));
  const double w = b.width;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double s = (g.x(j) - b.center) / w;
    const double e = b.amplitude * std::exp(-s * s);
    const double s2 = s * s;
    d[0][j] = e;
    if (order >= 1) d[1][j] = -2.0 * s / w * e;
    if (order >= 2) d[2][j] = (4.0 * s2 - 2.0) / (w * w) * e;
    if (order >= 3) d[3][j] = (-8.0 * s2 * s + 12.0 * s) / (w * w * w) * e;
    if (order >= 4) d[4][j] = (16.0 * s2 * s2 - 48.0 * s2 + 12.0) / (w * w * w * w) * e;
  }
  return RealJet(std::move(d));
}

RealJet BumpSum::jet(const Grid& g, int order) const {
  RealJet sum = RealJet::zero(g, order);
  for (const Bump& b : bumps) sum += gaussian_jet(g, b, order);
  return sum;
}

BumpSum random_bumps(std::mt19937_64& rng, double half_width) {
  const int count = 3 + static_cast<int>(rng() % 6);
  BumpSum s;
  for (int i = 0; i < count; ++i) {
    Bump b;
    b.center = uniform(rng, -0.5 * half_width, 0.5 * half_width);
    // tails at the boundary stay below exp(-16) of the peak
    b.width = uniform(rng, 0.5, std::min(5.0, half_width / 8.0));
    b.amplitude = uniform(rng, -1.0, 1.0);
    s.bumps.push_back(b);
  }
  return s;
}

RealJet project_out(const RealJet& f, const RealJet& c) {
  const double a = inner(c.value(), f.value()) / inner(c.value(), c.value());
  return f - c * a;
}

RealJet normalized(const RealJet& f) {
  const double n = std::sqrt(norm2(f.value()));
  if (!(n > 0.0)) raise(Errc::InvalidArgument, "cannot normalize a zero field");
  return f * (1.0 / n);
}

RealJet PhaseRamp::phase(const Grid& g, int order) const {
  std::vector<RealField> d;
  for (int k = 0; k <= order; ++k)
    d.push_back(RealField::sample(
        g, [&](double x) { return tanh_derivative(x, k, amplitude, 1.0 / scale); }));
  return RealJet(std::move(d));
}

ComplexJet PhaseRamp::psi(const Grid& g) const {
  return product(to_complex(u0_jet(g, 2)), exp_i(phase(g, 2)));
}

}  // namespace nlslab
