#include "doctest.h"
#include "helpers.hpp"

#include <numbers>

#include "nlslab/operators.hpp"
#include "nlslab/profiles.hpp"

using namespace nlslab;

namespace {

double interior_max(const RealField& f, double half) {
  double m = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    if (std::abs(f.grid().x(j)) <= half) m = std::max(m, std::abs(f[j]));
  return m;
}

RealJet bump_jet(std::mt19937_64& rng, const Grid& g) {
  return random_bumps(rng, g.half_width()).jet(g, 4);
}

}  // namespace

TEST_CASE("kernel directions") {
  Grid g = testing::default_grid();
  CHECK(max_abs(apply(OperatorKind::Kplus, u0_jet(g, 5).derivative())) <= 1e-8);
  CHECK(max_abs(apply(OperatorKind::Lminus, u0_jet(g, 2))) <= 1e-10);
  CHECK(interior_max(apply(OperatorKind::Kminus, u0_jet(g, 4)), 35.0) <= 1e-8);
  CHECK(std::abs(qform(OperatorKind::Kplus, u0_jet(g, 3).derivative())) <= 1e-10);
}

TEST_CASE("K = M - 2L pointwise") {
  Grid g = testing::default_grid();
  std::mt19937_64 rng(3);
  RealJet f = bump_jet(rng, g);
  RealField kp = apply(OperatorKind::Kplus, f);
  RealField mp = apply(OperatorKind::Mplus, f) - 2.0 * apply(OperatorKind::Lplus, f);
  CHECK(max_abs_diff(kp, mp) <= 1e-12);
  RealField km = apply(OperatorKind::Kminus, f);
  RealField mm = apply(OperatorKind::Mminus, f) - 2.0 * apply(OperatorKind::Lminus, f);
  CHECK(max_abs_diff(km, mm) <= 1e-12);
}

TEST_CASE("quadratic forms agree with <P f, f> for decaying f") {
  Grid g = testing::default_grid();
  std::mt19937_64 rng(5);
  for (int s = 0; s < 5; ++s) {
    RealJet f = bump_jet(rng, g);
    for (auto k : {OperatorKind::Kplus, OperatorKind::Kminus, OperatorKind::Lplus, OperatorKind::Mminus}) {
      const double q = qform(k, f);
      CHECK(std::abs(q - inner(apply(k, f), f.value())) <= 1e-10 * (1 + std::abs(q)));
    }
  }
}

TEST_CASE("factorization identities and nonnegativity on 100 samples") {
  Grid g = testing::default_grid();
  std::mt19937_64 rng(2024);
  double worst_plus = 0.0, worst_minus = 0.0, min_q = 1e300;
  for (int s = 0; s < 100; ++s) {
    RealJet u = bump_jet(rng, g);
    RealJet w = w_substitution(u.truncated(2));
    const double qp = qform(OperatorKind::Kplus, u);
    const double fp = norm2(w[1]) + norm2(w[0]);
    worst_plus = std::max(worst_plus, std::abs(qp - fp) / (1 + std::abs(qp)));

    RealJet v = bump_jet(rng, g);
    KminusFactors pq = kminus_factors(v.truncated(2));
    const double qm = qform(OperatorKind::Kminus, v);
    const double fm = norm2(pq.q.value()) + norm2(pq.p.value());
    worst_minus = std::max(worst_minus, std::abs(qm - fm) / (1 + std::abs(qm)));
    min_q = std::min({min_q, qp, qm});
  }
  CHECK(worst_plus <= 1e-8);
  CHECK(worst_minus <= 1e-8);
  CHECK(min_q >= -1e-9);
}

TEST_CASE("w substitution") {
  Grid g = testing::default_grid();
  CHECK(max_abs(w_substitution(u0_jet(g, 2).derivative()).value()) <= 1e-12);
  CHECK(max_abs(w_substitution(RealField(g))) == 0.0);
  RealField u = RealField::sample(g, [](double x) { return 1.0 / std::cosh(x); });
  RealField want = RealField::sample(g, [](double x) {
    return -std::tanh(x) / std::cosh(x) + kSqrt2 * std::tanh(x / kSqrt2) / std::cosh(x);
  });
  CHECK(max_abs_diff(w_substitution(u), want) <= 1e-10);
}

TEST_CASE("K- factors") {
  Grid g = testing::default_grid();
  KminusFactors f = kminus_factors(u0_jet(g, 2));
  CHECK(max_abs(f.p.value()) <= 1e-10);
  CHECK(max_abs(f.q.value()) <= 1e-10);
  KminusFieldFactors z = kminus_factors(RealField(g));
  CHECK(max_abs(z.p) == 0.0);
  CHECK(max_abs(z.q) == 0.0);

  std::mt19937_64 rng(9);
  const RealField u0 = sample_u0(g, 0);
  for (int s = 0; s < 5; ++s) {
    RealField v = random_bumps(rng, 40.0).jet(g, 0).value();
    KminusFieldFactors pq = kminus_factors(v);
    CHECK(max_abs_diff(diff(pq.p, 1), pointwise_product(u0, pq.q)) <= 1e-7);
  }
}

TEST_CASE("Duhamel reconstruction of u") {
  Grid g = testing::default_grid();
  DuhamelU zero = reconstruct_u(RealField(g));
  CHECK(max_abs(zero.u) == 0.0);
  CHECK(zero.A == 0.0);

  std::mt19937_64 rng(13);
  const RealJet u0p = u0_jet(g, 3).derivative();
  const double bound = std::pow(2.0, -0.25);
  for (int s = 0; s < 20; ++s) {
    RealJet u = project_out(random_bumps(rng, 40.0).jet(g, 2), u0p);
    RealJet w = w_substitution(u);
    DuhamelU r = reconstruct_u(w.value());
    CHECK(max_abs_diff(r.u, u.value()) <= 1e-6);
    CHECK(std::abs(inner(u0p.value(), r.W)) <= bound * std::sqrt(norm2(w.value())));
  }
}

TEST_CASE("Duhamel kernel norms") {
  Grid g = testing::default_grid();
  KernelNorms k = duhamel_kernel_norms(g);
  CHECK(std::abs(k.K1 - std::numbers::sqrt2) <= 1e-6);
  CHECK(k.K1_at == 0.0);
  // closed form of the Kinf profile, maximized on a fine grid
  double best = 0.0;
  for (int i = 0; i <= 400000; ++i) best = std::max(best, kinf_profile(i * 1e-5));
  CHECK(std::abs(k.Kinf - best) <= 1e-6);
  CHECK(k.Kinf == doctest::Approx(0.8483).epsilon(1e-4));
  KernelNorms coarse = duhamel_kernel_norms(Grid(40.0, 2001));
  CHECK(std::abs(coarse.Kinf - k.Kinf) <= 1e-5);
}

TEST_CASE("Duhamel bound is grid independent") {
  std::vector<double> ratios;
  for (std::size_t n : {2001u, 4001u}) {
    Grid g(40.0, n);
    std::mt19937_64 rng(17);
    double worst = 0.0;
    const RealJet u0p = u0_jet(g, 3).derivative();
    for (int s = 0; s < 10; ++s) {
      RealJet u = project_out(random_bumps(rng, 40.0).jet(g, 2), u0p);
      RealJet w = w_substitution(u);
      const double h2 = norm2(u[0]) + norm2(u[1]) + norm2(u[2]);
      const double h1 = norm2(w[0]) + norm2(w[1]);
      worst = std::max(worst, std::sqrt(h2 / h1));
    }
    ratios.push_back(worst);
  }
  CHECK(std::abs(ratios[1] / ratios[0] - 1.0) <= 1e-3);
}

TEST_CASE("Duhamel reconstruction of v") {
  Grid g = testing::default_grid();
  DuhamelV zero = reconstruct_v(RealField(g), RealField(g));
  CHECK(max_abs(zero.v) == 0.0);
  CHECK(zero.B == 0.0);

  std::mt19937_64 rng(19);
  const RealJet u0pp = u0_jet(g, 4).derivative().derivative();
  for (int s = 0; s < 10; ++s) {
    RealJet v = project_out(random_bumps(rng, 40.0).jet(g, 2), u0pp);
    KminusFactors pq = kminus_factors(v);
    DuhamelV r = reconstruct_v(pq.p.value(), pq.q.value());
    CHECK(max_abs_diff(r.v, v.value()) <= 1e-6);
    CHECK(r.v[g.center()] == doctest::Approx(-kSqrt2 * pq.p.value()[g.center()]).epsilon(1e-9));
  }
  RealField p = RealField::sample(g, [](double x) { return std::exp(-x * x); });
  CHECK_THROWS_AS(reconstruct_v(p, RealField(g)), Error);
}

TEST_CASE("assembled matrices") {
  Grid g = testing::default_grid();
  OperatorMatrix kp = assemble(OperatorKind::Kplus, g);
  CHECK(kp.symmetry_defect() <= 1e-12);
  CHECK(kp.matrix().bandwidth() == 4);
  RealJet f = gaussian_jet(g, Bump{0.7, 2.0, 1.0}, 4);
  const double q = qform(OperatorKind::Kplus, f);
  CHECK(std::abs(kp.quadratic_form(f.value()) - q) <= 1e-6 * std::abs(q));
  // A f matches the pointwise operator in the interior
  CHECK(interior_max(kp.multiply(f.value()) - apply(OperatorKind::Kplus, f), 38.0) <= 1e-4);

  OperatorMatrix km = assemble(OperatorKind::Kminus, g);
  const double L = g.half_width();
  RealField tapered = RealField::sample(g, [&](double x) {
    return std::tanh(x / kSqrt2) * 0.5 * (1.0 - std::tanh(std::abs(x) - (L - 6.0)));
  });
  CHECK(interior_max(km.multiply(tapered), 20.0) <= 1e-4);
  CHECK_THROWS_AS(assemble(OperatorKind::Kplus, Grid(10.0, 199)), Error);
}

TEST_CASE("operator names round trip") {
  for (auto k : {OperatorKind::Lplus, OperatorKind::Lminus, OperatorKind::Mplus,
                 OperatorKind::Mminus, OperatorKind::Kplus, OperatorKind::Kminus})
    CHECK(parse_operator_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_operator_kind("K"), Error);
}
