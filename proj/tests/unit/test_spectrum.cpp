#include "doctest.h"
#include "helpers.hpp"

#include "nlslab/operators.hpp"
#include "nlslab/profiles.hpp"

using namespace nlslab;

namespace {
Grid grid_for(double L, double h) { return Grid(L, static_cast<std::size_t>(std::lround(2 * L / h)) + 1); }
}  // namespace

TEST_CASE("K+ kernel, isolated mode and band edge") {
  std::vector<double> second, edge;
  for (double L : {20.0, 30.0, 40.0}) {
    Grid g = grid_for(L, 0.02);
    SpectrumReport r = spectrum(assemble(OperatorKind::Kplus, g), 4);
    REQUIRE(r.pairs.size() == 4);
    CHECK(std::abs(r.pairs[0].value) <= 5e-5);
    const RealField u0p = sample_u0(g, 1);
    CHECK(std::abs(inner(r.pairs[0].vector, u0p)) / std::sqrt(norm2(u0p)) >= 0.9999);
    for (const auto& p : r.pairs) CHECK(p.residual <= 1e-8 * r.matrix_norm);
    second.push_back(r.pairs[1].value);
    edge.push_back(r.pairs[2].value);
  }
  for (double s : second) {
    CHECK(s > 0.0);
    CHECK(s < 2.0);
    CHECK(std::abs(s - second.back()) <= 1e-5);
  }
  CHECK(edge[0] > edge[1]);
  CHECK(edge[1] > edge[2]);
  CHECK(edge[2] > 2.0);
}

TEST_CASE("K- lowest eigenvalue approaches zero from above") {
  std::vector<double> low;
  for (double L : {20.0, 30.0, 40.0}) {
    SpectrumReport r = spectrum(assemble(OperatorKind::Kminus, grid_for(L, 0.02)), 2);
    CHECK(r.pairs[0].value >= -5e-4);
    CHECK(r.pairs[0].value <= 5e-3 * 2);
    low.push_back(r.pairs[0].value);
  }
  CHECK(low[0] > low[1]);
  CHECK(low[1] > low[2]);
  CHECK(low[2] <= 5e-3);
}

TEST_CASE("coercivity constants") {
  auto cplus = [](double L, double h) {
    Grid g = grid_for(L, h);
    const RealField c = sample_u0(g, 1);
    return coercivity_estimate(assemble(OperatorKind::Kplus, g), &c, NormKind::H2).value;
  };
  auto cminus = [](double L, double h) {
    Grid g = grid_for(L, h);
    const RealField c = sample_u0(g, 2);
    return coercivity_estimate(assemble(OperatorKind::Kminus, g), &c, NormKind::WeakKminus).value;
  };
  const double p1 = cplus(40, 0.02), p2 = cplus(30, 0.04);
  const double m1 = cminus(40, 0.02), m2 = cminus(30, 0.04);
  MESSAGE("C+ = " << p1 << ", " << p2 << "   C- = " << m1 << ", " << m2);
  CHECK(p1 > 0.0);
  CHECK(m1 > 0.0);
  CHECK(std::abs(p1 / p2 - 1.0) <= 0.05);
  CHECK(std::abs(m1 / m2 - 1.0) <= 0.05);

  Grid g = grid_for(40, 0.02);
  CHECK(std::abs(coercivity_estimate(assemble(OperatorKind::Kplus, g), nullptr, NormKind::H2).value) <= 1e-6);
}

TEST_CASE("secular path: a constraint that is not parity-orthogonal") {
  Grid g = grid_for(20, 0.04);
  OperatorMatrix kp = assemble(OperatorKind::Kplus, g);
  // mixes even and odd parts, so the root lies strictly between lambda1 and lambda2
  RealField c = sample_u0(g, 1) + RealField::sample(g, [](double x) { return 0.3 * x * std::exp(-x * x); });
  CoercivityResult r = coercivity_estimate(kp, &c, NormKind::H2);
  CHECK(r.evaluations > 0);
  CHECK(r.value > r.lambda1);
  CHECK(r.value < r.lambda2);
  // brute-force check: Rayleigh quotient of (A - r N)^{-1} c direction is r
}

TEST_CASE("spectrum CSV") {
  Grid g = grid_for(20, 0.04);
  SpectrumReport r = spectrum(assemble(OperatorKind::Kplus, g), 3);
  const std::string csv = spectrum_csv(r);
  CHECK(csv.rfind("index,eigenvalue,residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const std::string ev = eigenvector_csv(r);
  CHECK(std::count(ev.begin(), ev.end(), '\n') == static_cast<long>(g.size()) + 1);
  CHECK_THROWS_AS(spectrum(assemble(OperatorKind::Kplus, g), g.size()), Error);
}
