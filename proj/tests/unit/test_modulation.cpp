#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <numbers>

#include "nlslab/error.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/profiles.hpp"
#include "nlslab/random_fields.hpp"

using namespace nlslab;

namespace {

// e^{-i theta} u0(x - xi)
ComplexField orbit_point(const Grid& g, double xi, double theta) {
  ComplexField z = make_complex(sample_u0(g, 0, xi), RealField(g));
  const cplx e = std::polar(1.0, -theta);
  for (std::size_t j = 0; j < z.size(); ++j) z[j] *= e;
  return z;
}

// e^{-i alpha}(u0 + eps(b1 + i b2))(x - s), everything in closed form
ComplexField bumped(const Grid& g, const BumpSum& b1, const BumpSum& b2, double eps, double s,
                    double alpha) {
  BumpSum c1 = b1, c2 = b2;
  for (auto& b : c1.bumps) b.center += s;
  for (auto& b : c2.bumps) b.center += s;
  const RealField re = sample_u0(g, 0, s) + eps * c1.jet(g, 0).value();
  const RealField im = eps * c2.jet(g, 0).value();
  ComplexField z = make_complex(re, im);
  const cplx e = std::polar(1.0, -alpha);
  for (std::size_t j = 0; j < z.size(); ++j) z[j] *= e;
  return z;
}

BumpSum small_bumps(std::mt19937_64& rng) {
  BumpSum b;
  const int n = 2 + static_cast<int>(rng() % 3);
  for (int k = 0; k < n; ++k)
    b.bumps.push_back({uniform(rng, -4, 4), uniform(rng, 0.7, 2.5), uniform(rng, -1, 1)});
  return b;
}

}  // namespace

TEST_CASE("residual vanishes on the orbit") {
  Grid g = testing::default_grid();
  const Vec2 f0 = f_residual(orbit_point(g, 0, 0), 0, 0);
  CHECK(std::abs(f0[0]) <= 1e-14);
  CHECK(std::abs(f0[1]) <= 1e-14);
  const Vec2 f1 = f_residual(orbit_point(g, 1.5, 0.2), 1.5, 0.2);
  CHECK(std::abs(f1[0]) <= 1e-13);
  CHECK(std::abs(f1[1]) <= 1e-13);
  CHECK_THROWS_AS(f_residual(orbit_point(g, 0, 0), 20.5, 0), Error);
  try {
    f_residual(orbit_point(g, 0, 0), -21, 0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ShiftTooLarge);
  }
}

TEST_CASE("jacobian at the soliton and against differences") {
  Grid g = testing::default_grid();
  const Mat2 J = f_jacobian(orbit_point(g, 0, 0), 0, 0);
  CHECK(J[0][0] == doctest::Approx(kU0pNorm2).epsilon(1e-12));
  CHECK(J[1][1] == doctest::Approx(-kU0pNorm2).epsilon(1e-12));
  CHECK(std::abs(J[0][1]) <= 1e-14);
  CHECK(std::abs(J[1][0]) <= 1e-14);

  std::mt19937_64 rng(11);
  const ComplexField psi = bumped(g, small_bumps(rng), small_bumps(rng), 0.1, 0.3, 0.1);
  const double xi = 0.2, th = -0.1, d = 1e-5;
  const Mat2 A = f_jacobian(psi, xi, th);
  const Vec2 fxp = f_residual(psi, xi + d, th), fxm = f_residual(psi, xi - d, th);
  const Vec2 ftp = f_residual(psi, xi, th + d), ftm = f_residual(psi, xi, th - d);
  for (int r = 0; r < 2; ++r) {
    CHECK(std::abs(A[r][0] - (fxp[r] - fxm[r]) / (2 * d)) <= 1e-6);
    CHECK(std::abs(A[r][1] - (ftp[r] - ftm[r]) / (2 * d)) <= 1e-6);
  }
}

TEST_CASE("recovers a shifted rotated soliton") {
  Grid g = testing::default_grid();
  const ModulationState s = solve_modulation(orbit_point(g, 1.5, 0.2));
  CHECK(std::abs(s.xi - 1.5) <= 1e-8);
  CHECK(std::abs(s.theta - 0.2) <= 1e-8);
  CHECK(max_abs(s.u) <= 1e-8);
  CHECK(max_abs(s.v) <= 1e-8);
  CHECK(s.distance <= 1e-7);
}

TEST_CASE("small perturbations converge fast and satisfy orthogonality") {
  Grid g = testing::default_grid();
  std::mt19937_64 rng(5);
  const RealField p1 = sample_u0(g, 1), p2 = sample_u0(g, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const BumpSum b1 = small_bumps(rng), b2 = small_bumps(rng);
    const double s = uniform(rng, -1, 1), a = uniform(rng, -0.5, 0.5);
    const ModulationState st = solve_modulation(bumped(g, b1, b2, 0.02, s, a));
    CHECK(st.iterations <= 6);
    CHECK(st.residual <= 1e-10);
    CHECK(std::abs(inner(p1, st.u)) <= 1e-9);
    CHECK(std::abs(inner(p2, st.v)) <= 1e-9);
    CHECK(std::abs(st.xi - s) <= 0.5);
  }
}

TEST_CASE("equivariance under translation and phase") {
  Grid g = testing::default_grid();
  std::mt19937_64 rng(17);
  const BumpSum b1 = small_bumps(rng), b2 = small_bumps(rng);
  const ModulationState base = solve_modulation(bumped(g, b1, b2, 0.03, 0, 0));
  for (auto [sh, al] : {std::pair{0.7, 0.3}, {-1.2, -0.4}, {2.5, 1.0}}) {
    const ModulationState m = solve_modulation(bumped(g, b1, b2, 0.03, sh, al), sh, al);
    CHECK(std::abs(m.xi - (base.xi + sh)) <= 1e-8);
    CHECK(std::abs(m.theta - (base.theta + al)) <= 1e-8);
  }
}

TEST_CASE("parameters depend continuously on the field") {
  Grid g = testing::default_grid();
  std::mt19937_64 rng(23);
  const BumpSum b1 = small_bumps(rng), b2 = small_bumps(rng), c1 = small_bumps(rng),
                c2 = small_bumps(rng);
  const ModulationState s0 = solve_modulation(bumped(g, b1, b2, 0.05, 0.4, 0.1));
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    ComplexField psi = bumped(g, b1, b2, 0.05, 0.4, 0.1);
    psi += delta * make_complex(c1.jet(g, 0).value(), c2.jet(g, 0).value());
    const ModulationState s = solve_modulation(psi, 0.4, 0.1);
    CHECK(std::abs(s.xi - s0.xi) <= 20 * delta);
    CHECK(std::abs(s.theta - s0.theta) <= 20 * delta);
  }
}

TEST_CASE("far from the orbit raises NoConvergence") {
  Grid g = testing::default_grid();
  // the constant state has no soliton at all
  ComplexField flat = make_complex(RealField(g, std::vector<double>(g.size(), 1.0)), RealField(g));
  CHECK_THROWS_AS(solve_modulation(flat), Error);
  // a large bump lands outside the neighbourhood
  std::mt19937_64 rng(3);
  BumpSum big;
  big.bumps.push_back({0.0, 3.0, 1.0});
  big.bumps.push_back({6.0, 2.0, -0.8});
  bool raised = false;
  try {
    solve_modulation(bumped(g, big, big, 1.0, 0, 0));
  } catch (const Error& e) {
    raised = e.code() == Errc::NoConvergence;
  }
  CHECK(raised);
}

TEST_CASE("rates vanish at the soliton and B can be singular") {
  Grid g = testing::default_grid();
  const RateSystem r0 = modulation_rates(RealField(g), RealField(g));
  CHECK(std::abs(r0.rates[0]) <= 1e-14);
  CHECK(std::abs(r0.rates[1]) <= 1e-14);
  CHECK(r0.B[0][0] == doctest::Approx(-kU0pNorm2));

  // diagonal of B cancels when <u0'', u> = ||u0'||^2
  const RealField p2 = sample_u0(g, 2);
  const RealField u = (kU0pNorm2 / norm2(p2)) * p2;
  bool raised = false;
  try {
    modulation_rates(u, RealField(g));
  } catch (const Error& e) {
    raised = e.code() == Errc::SingularB;
  }
  CHECK(raised);
}

TEST_CASE("tracker unwraps the phase") {
  Grid g = testing::default_grid();
  ModulationTracker tr;
  double prev = 0;
  for (int k = 0; k <= 20; ++k) {
    const double th = 0.4 * k;  // passes pi several times
    const auto rec = tr.observe(k, orbit_point(g, 0, th));
    CHECK(std::abs(rec.theta - th) <= 1e-8);
    if (k > 0) CHECK(rec.theta > prev);
    prev = rec.theta;
  }
  CHECK(ModulationTracker::csv_header() == "t,xi,theta,xidot,thetadot,dR_modulated");
}
