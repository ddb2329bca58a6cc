#include "nlslab/evolution.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nlslab/banded.hpp"
#include "nlslab/kernels.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab {

ComplexField to_rotating_frame(const ComplexField& psi, double t) {
  ComplexField out = psi;
  const cplx e = std::polar(1.0, t);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= e;
  return out;
}

ComplexField from_rotating_frame(const ComplexField& phi, double t) { return to_rotating_frame(phi, -t); }

double stationary_residual(const ComplexField& phi) {
  ComplexField r = diff(phi, 2);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] += (1.0 - std::norm(phi[j])) * phi[j];
  return max_abs(r);
}

std::string to_string(Scheme s) { return s == Scheme::Midpoint ? "midpoint" : "strang"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "midpoint") return Scheme::Midpoint;
  if (s == "strang") return Scheme::Strang;
  raise(Errc::ConfigError, fmt::format("unknown scheme '{}'", s));
}

ComplexField nonlinear_substep(const ComplexField& phi, double tau) {
  ComplexField out = phi;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= std::polar(1.0, tau * (1.0 - std::norm(phi[j])));
  return out;
}

// Unknowns: interior nodes 1..N-2 when pinned, every node when reflecting.
// The Laplacian acting on them is A x + f(boundary values), A banded.
struct Stepper::Impl {
  std::size_t n = 0, offset = 0;
  std::size_t k = 0;
  std::vector<double> band;  // A(i, j) at (j - i + k) + i (2k + 1)
  std::vector<double> f_left, f_right;  // boundary coupling of the first / last k rows
  std::optional<ComplexBandLU> lu;

  double a(std::size_t i, std::size_t j) const { return band[(j + k - i) + i * (2 * k + 1)]; }
  void set(std::size_t i, std::size_t j, double v) { band[(j + k - i) + i * (2 * k + 1)] = v; }

  std::vector<cplx> apply_a(const std::vector<cplx>& x) const {
    std::vector<cplx> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= k ? i - k : 0, hi = std::min(n - 1, i + k);
      cplx s{};
      for (std::size_t j = lo; j <= hi; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }
};

namespace {

void check_boundary(const ComplexField& phi) {
  const double a = std::abs(std::abs(phi.front()) - 1.0), b = std::abs(std::abs(phi.back()) - 1.0);
  if (!(a <= 1e-6 && b <= 1e-6))
    raise(Errc::InvalidArgument,
          fmt::format("boundary moduli must be 1 within 1e-6 (got deviations {:.3e}, {:.3e})", a, b));
}

}  // namespace

Boundary parse_boundary(const std::string& s) {
  if (s == "pinned") return Boundary::Pinned;
  if (s == "reflecting") return Boundary::Reflecting;
  raise(Errc::ConfigError, fmt::format("unknown boundary mode '{}'", s));
}

std::string to_string(Boundary b) { return b == Boundary::Pinned ? "pinned" : "reflecting"; }

Stepper::Stepper(const Grid& g, double dt, Scheme scheme, Boundary boundary)
    : grid_(g), dt_(dt), scheme_(scheme), boundary_(boundary) {
  if (!(std::isfinite(dt) && dt != 0.0)) raise(Errc::InvalidArgument, "dt must be finite and nonzero");
  if (g.size() < 7) raise(Errc::GridTooSmall, "stepper needs at least 7 nodes");
  auto impl = std::make_shared<Impl>();
  Impl& im = *impl;
  const bool pinned = boundary == Boundary::Pinned;
  const std::size_t n = pinned ? g.size() - 2 : g.size();
  const double h2 = g.spacing() * g.spacing();
  im.n = n;
  im.offset = pinned ? 1 : 0;
  im.k = scheme == Scheme::Midpoint ? 2 : 1;
  const std::size_t k = im.k;
  im.band.assign((2 * k + 1) * n, 0.0);
  im.f_left.assign(k, 0.0);
  im.f_right.assign(k, 0.0);

  // interior stencil c[0] (center), c[1], c[2]
  const std::vector<double> c = k == 2 ? std::vector<double>{-2.5, 4.0 / 3.0, -1.0 / 12.0}
                                       : std::vector<double>{-2.0, 1.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d <= k; ++d) {
      if (i + d < n) im.set(i, i + d, c[d] / h2);
      if (d > 0 && i >= d) im.set(i, i - d, c[d] / h2);
    }
  // row i near the left edge reaches node (offset + i - d) < 0 for d > offset + i:
  // fold those ghost contributions back, mirrored on the right.
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t d = 1; d <= k; ++d) {
      const long node = static_cast<long>(im.offset + i) - static_cast<long>(d);  // physical node
      if (node >= 0 && !(pinned && node == 0)) continue;
      const double w = c[d] / h2;
      if (pinned) {
        if (node == 0) {
          im.f_left[i] += w;
        } else {
          // ghost phi_{node} = 2 phi_0 - phi_{-node}
          im.f_left[i] += 2.0 * w;
          const std::size_t mirror = static_cast<std::size_t>(-node) - 1;  // unknown index
          im.set(i, mirror, im.a(i, mirror) - w);
        }
      } else {
        // ghost phi_{node} = phi_{-node}
        const std::size_t mirror = static_cast<std::size_t>(-node);
        im.set(i, mirror, im.a(i, mirror) + w);
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    im.f_right[i] = im.f_left[i];
    for (std::size_t j = 0; j < std::min(n, 2 * k + 1); ++j)
      if ((j > i ? j - i : i - j) <= k) im.set(n - 1 - i, n - 1 - j, im.a(i, j));
  }

  const cplx cc(0.0, -0.5 * dt);
  im.lu.emplace(n, k, [&](std::size_t i, std::size_t j) {
    return (i == j ? cplx(1.0) : cplx(0.0)) + cc * im.a(i, j);
  });
  impl_ = std::move(impl);
}

ComplexField Stepper::step(const ComplexField& phi) const {
  if (!(phi.grid() == grid_)) raise(Errc::GridMismatch, "stepper and field grids differ");
  if (boundary_ == Boundary::Pinned) check_boundary(phi);
  const Impl& im = *impl_;
  const std::size_t n = im.n, off = im.offset;
  const cplx left = phi.front(), right = phi.back();

  // boundary source of the Laplacian (pinned only)
  std::vector<cplx> f(n, cplx{});
  for (std::size_t i = 0; i < im.k; ++i) {
    f[i] += im.f_left[i] * left;
    f[n - 1 - i] += im.f_right[i] * right;
  }

  auto linear_rhs = [&](const std::vector<cplx>& x, double dt) {
    std::vector<cplx> r = im.apply_a(x);
    const cplx c(0.0, 0.5 * dt);
    for (std::size_t i = 0; i < n; ++i) r[i] = x[i] + c * r[i] + cplx(0.0, dt) * f[i];
    return r;
  };

  ComplexField out = phi;
  if (scheme_ == Scheme::Strang) {
    const ComplexField half = nonlinear_substep(phi, 0.5 * dt_);
    std::vector<cplx> x(half.data() + off, half.data() + off + n);
    std::vector<cplx> r = linear_rhs(x, dt_);
    im.lu->solve(r);
    ComplexField mid = half;
    std::copy(r.begin(), r.end(), mid.data() + off);
    out = nonlinear_substep(mid, 0.5 * dt_);
    last_iterations_ = 0;
    return out;
  }

  const std::vector<cplx> x0(phi.data() + off, phi.data() + off + n);
  const std::vector<cplx> base = linear_rhs(x0, dt_);
  const auto& kt = kernels::active();
  std::vector<cplx> x1 = x0, g(n), r(n);
  double change = 0.0, prev_change = INFINITY;
  int it = 0;
  for (; it < 100; ++it) {
    kt.midpoint_nonlinearity(x0.data(), x1.data(), g.data(), n);
    for (std::size_t i = 0; i < n; ++i) r[i] = base[i] + cplx(0.0, dt_) * g[i];
    im.lu->solve(r);
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(r[i] - x1[i]));
    x1.swap(r);
    if (change <= 1e-15) break;
    // at the roundoff floor the change stops shrinking
    if (change <= 1e-13 && change >= 0.5 * prev_change) break;
    prev_change = change;
  }
  if (!(change <= 1e-12))
    raise(Errc::NoConvergence, fmt::format("implicit step: fixed point stalled at {:.3e}", change));
  last_iterations_ = it + 1;
  std::copy(x1.begin(), x1.end(), out.data() + off);
  if (!out.all_finite()) raise(Errc::LinearSolveFailure, "non-finite values after the linear solve");
  return out;
}

ComplexField step(const ComplexField& phi, double dt, Scheme scheme, Boundary boundary) {
  return Stepper(phi.grid(), dt, scheme, boundary).step(phi);
}

double SimConfig::resolved_dt() const { return dt == 0.0 ? grid().spacing() : dt; }

std::size_t SimConfig::steps() const {
  const double a = std::abs(resolved_dt());
  return static_cast<std::size_t>(std::llround(T / a));
}

void SimConfig::validate() const {
  auto fail = [](const std::string& m) { raise(Errc::ConfigError, m); };
  if (!(L > 0) || N < 201 || N % 2 == 0) fail(fmt::format("bad grid L = {}, N = {}", L, N));
  const double h = 2.0 * L / static_cast<double>(N - 1);
  const double d = dt == 0.0 ? h : dt;
  if (!std::isfinite(d) || std::abs(d) > h * (1.0 + 1e-12))
    fail(fmt::format("|dt| = {} exceeds the grid spacing {}", std::abs(d), h));
  if (!(T >= 0) || !std::isfinite(T)) fail("T must be a finite nonnegative number");
  const double n = T / std::abs(d);
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
    fail(fmt::format("T = {} is not a whole number of steps of {}", T, std::abs(d)));
  if (cadence < 1) fail("cadence must be at least 1");
  if ((observe_distance || observe_modulation) && !(R >= 1.0 && 1.5 * R <= L))
    fail(fmt::format("R = {} needs 1 <= R and 3R/2 <= L", R));
}

Trajectory evolve(const ComplexField& phi0, const SimConfig& cfg, const std::vector<Observer>& observers) {
  cfg.validate();
  const Grid g = cfg.grid();
  if (!(phi0.grid() == g)) raise(Errc::GridMismatch, "initial field does not live on the configured grid");
  if (cfg.boundary == Boundary::Pinned) check_boundary(phi0);
  const double dt = cfg.resolved_dt();
  const std::size_t nsteps = cfg.steps();
  const Stepper stepper(g, dt, cfg.scheme, cfg.boundary);
  const ComplexField ref = make_complex(sample_u0(g, 0), RealField(g));
  ModulationOptions mopt;
  mopt.R = cfg.R;
  ModulationTracker tracker(mopt);

  Trajectory tr;
  auto observe = [&](std::size_t n, const ComplexField& phi) {
    const std::size_t stamp = tr.t.size();
    const double t = cfg.t0 + static_cast<double>(n) * dt;
    try {
      if (cfg.observe_conserved) tr.conserved.push_back(conserved(phi));
      if (cfg.observe_distance) tr.dR.push_back(distance_dR(phi, ref, cfg.R));
      if (cfg.observe_modulation) tr.modulation.push_back(tracker.observe(t, phi));
      for (const auto& ob : observers) ob(stamp, t, phi);
    } catch (const std::exception& e) {
      raise(Errc::ObserverFailure, fmt::format("observer failed at stamp {} (t = {}): {}", stamp, t, e.what()));
    }
    tr.t.push_back(t);
    tr.step_index.push_back(n);
    if (cfg.keep_snapshots) tr.snapshots.push_back(phi);
  };

  ComplexField phi = phi0;
  observe(0, phi);
  for (std::size_t n = 1; n <= nsteps; ++n) {
    phi = stepper.step(phi);
    if (n % static_cast<std::size_t>(cfg.cadence) == 0 || n == nsteps) observe(n, phi);
  }
  tr.final_state = std::move(phi);
  return tr;
}

Drift conservation_drift(const Trajectory& tr) {
  Drift d;
  if (tr.conserved.empty()) return d;
  const ConservedSet& c0 = tr.conserved.front();
  for (const ConservedSet& c : tr.conserved) {
    d.E = std::max(d.E, std::abs(c.E - c0.E) / std::abs(c0.E));
    d.S = std::max(d.S, std::abs(c.S - c0.S) / std::abs(c0.S));
    d.Lambda = std::max(d.Lambda, std::abs(c.Lambda - c0.Lambda) / (1.0 + std::abs(c0.Lambda)));
    d.Q = std::max(d.Q, std::abs(c.Q - c0.Q) / std::abs(c0.Q));
  }
  return d;
}

std::string snapshot_csv(const ComplexField& phi) {
  std::string s = "x,re_phi,im_phi\n";
  const Grid& g = phi.grid();
  for (std::size_t j = 0; j < phi.size(); ++j)
    s += fmt::format("{:.17g},{:.17g},{:.17g}\n", g.x(j), phi[j].real(), phi[j].imag());
  return s;
}

}  // namespace nlslab
