#include "doctest.h"
#include "helpers.hpp"

#include <numbers>

#include "nlslab/profiles.hpp"

using namespace nlslab;

TEST_CASE("black soliton ODE identities") {
  Grid g = testing::default_grid();
  SolitonBundle s = black_soliton(g);
  double r1 = 0.0, r2 = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double u = s.u0[j];
    r1 = std::max(r1, std::abs(s.u0p[j] - (1.0 - u * u) / kSqrt2));
    r2 = std::max(r2, std::abs(s.u0pp[j] + u - u * u * u));
  }
  CHECK(r1 <= 1e-13);
  CHECK(r2 <= 1e-13);
  CHECK(s.u0[g.center()] == 0.0);
  CHECK(s.u0p[g.center()] == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-15));
  CHECK(testing::rel_err(norm2(s.u0p), 2.0 * kSqrt2 / 3.0) <= 1e-10);
  CHECK(std::abs(1.0 - s.u0.back() * s.u0.back()) <= 1e-20);
}

TEST_CASE("parity of the profile and its derivatives") {
  Grid g = testing::default_grid();
  SolitonBundle s = black_soliton(g);
  const std::size_t n = g.size();
  double odd = 0, even = 0, odd2 = 0;
  for (std::size_t j = 0; j < n; ++j) {
    odd = std::max(odd, std::abs(s.u0[j] + s.u0[n - 1 - j]));
    even = std::max(even, std::abs(s.u0p[j] - s.u0p[n - 1 - j]));
    odd2 = std::max(odd2, std::abs(s.u0pp[j] + s.u0pp[n - 1 - j]));
    REQUIRE(s.u0p[j] > 0.0);
  }
  CHECK(odd <= 1e-13);
  CHECK(even <= 1e-13);
  CHECK(odd2 <= 1e-13);
}

TEST_CASE("closed-form derivatives agree with differentiating the lower ones") {
  Grid g(20.0, 2001);
  for (int k = 0; k < 5; ++k) {
    CAPTURE(k);
    CHECK(max_abs_diff(diff(sample_u0(g, k), 1), sample_u0(g, k + 1)) <= 1e-8);
  }
  // higher orders against a direct symbolic form
  const double x = 0.37, t = std::tanh(x / kSqrt2);
  CHECK(u0_derivative(x, 3) == doctest::Approx(-(1 - t * t) * (1 - 3 * t * t) / kSqrt2).epsilon(1e-14));
}

TEST_CASE("dark soliton family") {
  Grid g = testing::default_grid();
  ComplexField d0 = dark_soliton(g, 0.0);
  CHECK(max_abs(imag_part(d0)) == 0.0);
  CHECK(max_abs_diff(real_part(d0), black_soliton(g).u0) <= 1e-15);
  ComplexField d5 = dark_soliton(g, 0.5);
  CHECK(std::abs(std::norm(d5.front()) - 1.0) <= 1e-12);
  CHECK(std::abs(std::norm(d5.back()) - 1.0) <= 1e-12);
  CHECK(travelling_residual(dark_soliton(g, 0.3), 0.3) <= 1e-7);
  CHECK(travelling_residual(dark_soliton(g, 0.3), -0.3) > 1e-2);
  CHECK(max_abs_diff(dark_soliton(g, 1e-4), d0) <= 1e-3);
  CHECK_THROWS_AS(dark_soliton(g, std::sqrt(2.0)), Error);
  CHECK_THROWS_AS(dark_soliton(g, -1.5), Error);
}
