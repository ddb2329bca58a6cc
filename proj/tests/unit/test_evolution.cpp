#include "doctest.h"
#include "helpers.hpp"

#include <cmath>

#include "nlslab/error.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/profiles.hpp"
#include "nlslab/random_fields.hpp"

using namespace nlslab;

namespace {

ComplexField soliton(const Grid& g) { return make_complex(sample_u0(g, 0), RealField(g)); }

ComplexField perturbed(const Grid& g, double eps) {
  BumpSum b1, b2;
  b1.bumps = {{0.5, 2.0, eps}, {3.0, 1.5, -eps}};
  b2.bumps = {{-1.0, 2.0, eps}};
  return make_complex(sample_u0(g, 0) + b1.jet(g, 0).value(), b2.jet(g, 0).value());
}

}  // namespace

TEST_CASE("rotating frame") {
  Grid g = testing::default_grid();
  const ComplexField u0 = soliton(g);
  CHECK(max_abs_diff(to_rotating_frame(from_rotating_frame(u0, 1.3), 1.3), u0) <= 1e-15);
  std::mt19937_64 rng(2);
  ComplexField z(g);
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
  CHECK(max_abs_diff(from_rotating_frame(to_rotating_frame(z, 0.7), 0.7), z) <= 1e-15);
  CHECK(stationary_residual(u0) <= 1e-10);
}

TEST_CASE("nonlinear substep keeps the modulus") {
  Grid g(10, 201);
  const ComplexField p = perturbed(g, 0.2);
  const ComplexField q = nonlinear_substep(p, 0.37);
  double worst = 0;
  for (std::size_t j = 0; j < p.size(); ++j) worst = std::max(worst, std::abs(std::abs(q[j]) - std::abs(p[j])));
  CHECK(worst <= 1e-15);
}

TEST_CASE("one step leaves the soliton in place") {
  Grid g = testing::default_grid();
  const ComplexField u0 = soliton(g);
  for (Boundary b : {Boundary::Reflecting, Boundary::Pinned})
    CHECK(max_abs_diff(step(u0, g.spacing(), Scheme::Midpoint, b), u0) <= 1e-9);
  // the splitting has a second-order Laplacian, so only a looser bound
  CHECK(max_abs_diff(step(u0, g.spacing(), Scheme::Strang), u0) <= 1e-5);
}

TEST_CASE("local error is third order in dt") {
  Grid g(20, 1001);
  const ComplexField p = perturbed(g, 0.1);
  for (Scheme s : {Scheme::Midpoint, Scheme::Strang}) {
    std::vector<double> dts{0.02, 0.01, 0.005}, errs;
    for (double dt : dts) {
      const Stepper full(g, dt, s), half(g, dt / 2, s);
      errs.push_back(max_abs_diff(full.step(p), half.step(half.step(p))));
    }
    const double slope = std::log(errs[0] / errs[2]) / std::log(dts[0] / dts[2]);
    INFO(to_string(s));
    CHECK(std::abs(slope - 3.0) <= 0.2);
  }
}

TEST_CASE("pinned mode enforces the boundary modulus") {
  Grid g(20, 401);
  ComplexField p = soliton(g);
  p[0] *= 1.01;
  bool raised = false;
  try {
    step(p, 0.1, Scheme::Midpoint, Boundary::Pinned);
  } catch (const Error& e) {
    raised = e.code() == Errc::InvalidArgument;
  }
  CHECK(raised);
  const ComplexField p0 = perturbed(g, 0.05);
  const ComplexField q = step(p0, 0.1, Scheme::Midpoint, Boundary::Pinned);
  CHECK(q.front() == p0.front());
  CHECK(q.back() == p0.back());
}

TEST_CASE("config validation") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  auto code_of = [](const SimConfig& cfg) {
    try {
      cfg.validate();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  SimConfig bad = c;
  bad.dt = 0.03;
  CHECK(code_of(bad) == Errc::ConfigError);
  bad = c;
  bad.R = 30;
  CHECK(code_of(bad) == Errc::ConfigError);
  bad = c;
  bad.T = 0.03;
  CHECK(code_of(bad) == Errc::ConfigError);
  bad = c;
  bad.cadence = 0;
  CHECK(code_of(bad) == Errc::ConfigError);
  CHECK(parse_boundary("pinned") == Boundary::Pinned);
  CHECK_THROWS_AS(parse_boundary("periodic"), Error);
  CHECK(parse_scheme("strang") == Scheme::Strang);
}

TEST_CASE("stationary soliton over T = 20") {
  Grid g = testing::default_grid();
  SimConfig c;
  c.keep_snapshots = true;
  const Trajectory tr = evolve(soliton(g), c);
  CHECK(tr.stamps() == 41);
  double sup = 0;
  for (const auto& s : tr.snapshots) sup = std::max(sup, max_abs_diff(s, soliton(g)));
  CHECK(sup <= 1e-6);
  const Drift d = conservation_drift(tr);
  CHECK(d.max() <= 1e-8);
  for (std::size_t k = 1; k < tr.stamps(); ++k) CHECK(tr.t[k] > tr.t[k - 1]);
}

TEST_CASE("perturbed run: conservation and time reversal") {
  Grid g = testing::default_grid();
  const ComplexField p = perturbed(g, 0.01);
  SimConfig c;
  c.observe_distance = false;
  const Trajectory fwd = evolve(p, c);
  const Drift d = conservation_drift(fwd);
  CHECK(d.E <= 1e-6);
  CHECK(d.S <= 1e-6);
  CHECK(d.Lambda <= 1e-6);
  CHECK(d.Q <= 1e-6);

  SimConfig back = c;
  back.dt = -g.spacing();
  back.t0 = c.T;
  back.observe_conserved = false;
  const Trajectory rev = evolve(*fwd.final_state, back);
  CHECK(max_abs_diff(*rev.final_state, p) <= 1e-6);
  CHECK(rev.t.back() == doctest::Approx(0.0));
}

TEST_CASE("gauge equivariance") {
  Grid g(20, 1001);
  const ComplexField p = perturbed(g, 0.05);
  const double alpha = 0.9;
  const cplx e = std::polar(1.0, alpha);
  SimConfig c;
  c.L = 20;
  c.N = 1001;
  c.T = 2;
  c.observe_conserved = c.observe_distance = false;
  ComplexField a = *evolve(p, c).final_state;
  a *= e;
  ComplexField rp = p;
  rp *= e;
  CHECK(max_abs_diff(*evolve(rp, c).final_state, a) <= 1e-10);
}

TEST_CASE("dark soliton moves at its speed") {
  Grid g = testing::default_grid();
  SimConfig c;
  c.observe_modulation = true;
  c.observe_conserved = false;
  const Trajectory tr = evolve(dark_soliton(g, 0.1), c);
  const auto& m = tr.modulation;
  const double slope = (m.back().xi - m.front().xi) / (m.back().t - m.front().t);
  CHECK(std::abs(std::abs(slope) - 0.1) <= 0.002);
  // linear in t
  for (const auto& r : m) CHECK(std::abs(r.xi - m.front().xi - slope * r.t) <= 1e-3);
}

TEST_CASE("rate formula against differences of tracked parameters") {
  Grid g = testing::default_grid();
  SimConfig c;
  c.T = 4;
  c.cadence = 1;
  c.observe_modulation = true;
  c.observe_conserved = c.observe_distance = false;
  const Trajectory tr = evolve(perturbed(g, 0.02), c);
  const auto& m = tr.modulation;
  double num = 0, den = 0;
  for (std::size_t k = 1; k + 1 < m.size(); ++k) {
    const double fx = (m[k + 1].xi - m[k - 1].xi) / (m[k + 1].t - m[k - 1].t);
    const double ft = (m[k + 1].theta - m[k - 1].theta) / (m[k + 1].t - m[k - 1].t);
    num = std::max({num, std::abs(fx - m[k].xidot), std::abs(ft - m[k].thetadot)});
    den = std::max({den, std::abs(fx), std::abs(ft)});
  }
  CHECK(num / den <= 0.02);
}

TEST_CASE("observer failure carries the stamp") {
  Grid g(20, 1001);
  SimConfig c;
  c.L = 20;
  c.N = 1001;
  c.T = 2;
  c.cadence = 10;
  std::vector<Observer> obs{[](std::size_t stamp, double, const ComplexField&) {
    if (stamp == 3) throw std::runtime_error("boom");
  }};
  std::string what;
  try {
    evolve(soliton(g), c, obs);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ObserverFailure);
    what = e.what();
  }
  CHECK(what.find("stamp 3") != std::string::npos);
}

TEST_CASE("snapshot format") {
  Grid g(1, 201);
  const std::string s = snapshot_csv(soliton(g));
  CHECK(s.rfind("x,re_phi,im_phi\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 202);
}
