#include "nlslab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "nlslab/profiles.hpp"

namespace nlslab {

std::string_view to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::Lplus: return "Lplus";
    case OperatorKind::Lminus: return "Lminus";
    case OperatorKind::Mplus: return "Mplus";
    case OperatorKind::Mminus: return "Mminus";
    case OperatorKind::Kplus: return "Kplus";
    case OperatorKind::Kminus: return "Kminus";
  }
  return "?";
}

OperatorKind parse_operator_kind(std::string_view name) {
  for (auto k : {OperatorKind::Lplus, OperatorKind::Lminus, OperatorKind::Mplus,
                 OperatorKind::Mminus, OperatorKind::Kplus, OperatorKind::Kminus})
    if (to_string(k) == name) return k;
  raise(Errc::InvalidArgument, "unknown operator '" + std::string(name) + "'");
}

std::string_view to_string(NormKind n) { return n == NormKind::H2 ? "H2" : "WeakKminus"; }

Coefficients coefficients(OperatorKind kind, const Grid& g) {
  const RealField u0 = sample_u0(g, 0), u0p = sample_u0(g, 1);
  Coefficients c{0.0, RealField(g), RealField(g), RealField(g)};
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double u = u0[j], u2 = u * u, uup = u * u0p[j];
    double a = 1.0, ax = 0.0, b = 0.0;
    switch (kind) {
      case OperatorKind::Lplus: b = 3 * u2 - 1; break;
      case OperatorKind::Lminus: b = u2 - 1; break;
      case OperatorKind::Mplus:
        a = 5 * u2, ax = 10 * uup, b = -5 * u2 * u2 + 15 * u2 - 4;
        break;
      case OperatorKind::Mminus:
        a = 3 * u2, ax = 6 * uup, b = u2 - 1;
        break;
      case OperatorKind::Kplus:
        a = 5 * u2 - 2, ax = 10 * uup, b = 9 * u2 - 5 * u2 * u2 - 2;
        break;
      case OperatorKind::Kminus:
        a = 3 * u2 - 2, ax = 6 * uup, b = 1 - u2;
        break;
    }
    c.a[j] = a;
    c.ax[j] = ax;
    c.b[j] = b;
  }
  c.c4 = (kind == OperatorKind::Lplus || kind == OperatorKind::Lminus) ? 0.0 : 1.0;
  return c;
}

RealField apply(const Coefficients& c, const RealJet& f) {
  f.require(c.c4 != 0.0 ? 4 : 2);
  RealField out(f.grid());
  for (std::size_t j = 0; j < out.size(); ++j) {
    double v = -c.a[j] * f[2][j] - c.ax[j] * f[1][j] + c.b[j] * f[0][j];
    if (c.c4 != 0.0) v += c.c4 * f[4][j];
    out[j] = v;
  }
  return out;
}

RealField apply(OperatorKind kind, const RealJet& f) { return apply(coefficients(kind, f.grid()), f); }

RealField apply(OperatorKind kind, const RealField& f) {
  const int order = (kind == OperatorKind::Lplus || kind == OperatorKind::Lminus) ? 2 : 4;
  return apply(kind, RealJet::from_samples(f, order));
}

double qform(const Coefficients& c, const RealJet& f) {
  f.require(2);
  RealField d(f.grid());
  for (std::size_t j = 0; j < d.size(); ++j)
    d[j] = c.c4 * f[2][j] * f[2][j] + c.a[j] * f[1][j] * f[1][j] + c.b[j] * f[0][j] * f[0][j];
  return integrate(d);
}

double qform(OperatorKind kind, const RealJet& f) { return qform(coefficients(kind, f.grid()), f); }

double qform(OperatorKind kind, const RealField& f) {
  return qform(kind, RealJet::from_samples(f, 2));
}

RealJet w_substitution(const RealJet& u) {
  RealJet u0 = u0_jet(u.grid(), u.order());
  return u.derivative() + product(u0, u).truncated(u.order() - 1) * kSqrt2;
}

RealField w_substitution(const RealField& u) {
  RealField w = diff(u, 1);
  const RealField u0 = sample_u0(u.grid(), 0);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] += kSqrt2 * u0[j] * u[j];
  return w;
}

KminusFactors kminus_factors(const RealJet& v) {
  v.require(2);
  const Grid& g = v.grid();
  RealJet u0 = u0_jet(g, v.order());
  RealJet p = product(u0.truncated(v.order() - 1), v.derivative()) -
              product(u0.derivative(), v.truncated(v.order() - 1));
  // 1 - u0^2 = sqrt2 u0'
  RealJet q = v.derivative().derivative() +
              product(u0.derivative() * kSqrt2, v).truncated(v.order() - 2);
  return {p, q};
}

KminusFieldFactors kminus_factors(const RealField& v) {
  const Grid& g = v.grid();
  const RealField u0 = sample_u0(g, 0), u0p = sample_u0(g, 1);
  const RealField vx = diff(v, 1), vxx = diff(v, 2);
  RealField p(g), q(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    p[j] = u0[j] * vx[j] - u0p[j] * v[j];
    q[j] = vxx[j] + (1.0 - u0[j] * u0[j]) * v[j];
  }
  return {p, q};
}

namespace {

double cosh2(double s) {
  const double c = std::cosh(s);
  return c * c;
}

}  // namespace

DuhamelU reconstruct_u(const RealField& w) {
  const Grid& g = w.grid();
  RealField f(g);
  for (std::size_t j = 0; j < g.size(); ++j) f[j] = cosh2(g.x(j) / kSqrt2) * w[j];
  RealField W = cumulative_from_center(f);
  for (std::size_t j = 0; j < g.size(); ++j) W[j] /= cosh2(g.x(j) / kSqrt2);
  const RealField u0p = sample_u0(g, 1);
  const double A = -inner(u0p, W) / inner(u0p, u0p);
  RealField u = W + u0p * A;
  return {u, W, A};
}

DuhamelV reconstruct_v(const RealField& p, const RealField& q, double tolerance) {
  p.check(q);
  const Grid& g = p.grid();
  const RealField u0 = sample_u0(g, 0), u0pp = sample_u0(g, 2);
  const RealField px = diff(p, 1);
  double consistency = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    consistency = std::max(consistency, std::abs(px[j] - u0[j] * q[j]));
  if (consistency > tolerance)
    raise(Errc::InconsistentPQ,
          fmt::format("max |p_x - u0 q| = {:.3e} exceeds {:.1e}", consistency, tolerance));
  RealField s = p + q * kSqrt2;
  RealField Z = cumulative_from_center(s);
  for (std::size_t j = 0; j < g.size(); ++j) Z[j] = u0[j] * Z[j] - kSqrt2 * p[j];
  const double B = -inner(u0pp, Z) / inner(u0pp, u0);
  RealField v = Z + u0 * B;
  return {v, Z, B, consistency};
}

double kinf_profile(double x) {
  x = std::abs(x);
  const double e = std::exp(-kSqrt2 * x);
  return (1.0 + 2.0 * kSqrt2 * x * e - e * e) / (kSqrt2 * (1.0 + e) * (1.0 + e));
}

KernelNorms duhamel_kernel_norms(const Grid& g) {
  KernelNorms k;
  const std::size_t c = g.center(), n = g.size();
  RealField sech2(g), ch2(g);
  for (std::size_t j = 0; j < n; ++j) {
    ch2[j] = cosh2(g.x(j) / kSqrt2);
    sech2[j] = 1.0 / ch2[j];
  }
  // int_{|y|}^inf sech^2: cumulative from the centre, tail beyond L is 1e-24.
  const RealField S = cumulative_from_center(sech2);
  const double total = S[n - 1];
  const RealField C = cumulative_from_center(ch2);
  std::size_t best = c;
  for (std::size_t j = c; j < n; ++j) {
    const double k1 = ch2[j] * (total - S[j]);
    if (k1 > k.K1) k.K1 = k1, k.K1_at = g.x(j);
    const double kinf = C[j] * sech2[j];
    if (kinf > k.Kinf) k.Kinf = kinf, k.Kinf_at = g.x(j), best = j;
  }
  // the Kinf maximum is interior: refine with the parabola through its neighbours
  if (best > c && best + 1 < n) {
    const double fm = C[best - 1] * sech2[best - 1], f0 = k.Kinf, fp = C[best + 1] * sech2[best + 1];
    const double curv = fm - 2.0 * f0 + fp;
    if (curv < 0.0) {
      const double t = 0.5 * (fm - fp) / curv;
      k.Kinf = f0 - 0.25 * (fm - fp) * t;
      k.Kinf_at += t * g.spacing();
    }
  }
  return k;
}

// --- banded discretization -------------------------------------------------

OperatorMatrix::OperatorMatrix(OperatorKind kind, Grid g, SymBandMatrix a, double defect)
    : kind_(kind), grid_(std::move(g)), a_(std::move(a)), defect_(defect) {}

std::vector<double> OperatorMatrix::restrict_to_interior(const RealField& f) const {
  return std::vector<double>(f.data() + 1, f.data() + f.size() - 1);
}

RealField OperatorMatrix::extend(const std::vector<double>& x) const {
  RealField f(grid_);
  std::copy(x.begin(), x.end(), f.data() + 1);
  return f;
}

RealField OperatorMatrix::multiply(const RealField& f) const {
  return extend(a_.multiply(restrict_to_interior(f)));
}

double OperatorMatrix::quadratic_form(const RealField& f) const {
  return a_.quadratic(restrict_to_interior(f)) * grid_.spacing();
}

namespace {

constexpr std::size_t kBand = 4;

// Row of a 5-point stencil at interior unknown r, folded onto the unknowns by
// odd reflection through the boundary nodes.
struct SparseRow {
  std::size_t idx[5];
  double val[5];
  int len = 0;
  void add(std::size_t i, double v) {
    for (int k = 0; k < len; ++k)
      if (idx[k] == i) {
        val[k] += v;
        return;
      }
    idx[len] = i;
    val[len] = v;
    ++len;
  }
};

SparseRow stencil_row(std::size_t r, std::size_t m, const double (&w)[5]) {
  SparseRow row;
  const long node = static_cast<long>(r) + 1;
  const long last = static_cast<long>(m) + 1;  // boundary node index N-1
  for (int o = -2; o <= 2; ++o) {
    const long k = node + o;
    const double c = w[o + 2];
    if (k == 0 || k == last) continue;
    if (k < 0)
      row.add(static_cast<std::size_t>(-k - 1), -c);
    else if (k > last)
      row.add(static_cast<std::size_t>(2 * last - k - 1), -c);
    else
      row.add(static_cast<std::size_t>(k - 1), c);
  }
  return row;
}

struct FullBand {
  std::size_t m;
  std::vector<double> v;  // (2*kBand+1) x m, v[(kBand + i - j) + j*(2kBand+1)]
  explicit FullBand(std::size_t m_) : m(m_), v((2 * kBand + 1) * m_, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return v[(kBand + i - j) + j * (2 * kBand + 1)]; }
  void outer(const SparseRow& r, double weight) {
    for (int a = 0; a < r.len; ++a)
      for (int b = 0; b < r.len; ++b) at(r.idx[a], r.idx[b]) += weight * r.val[a] * r.val[b];
  }
};

FullBand norm_band(const Grid& g, double identity, double point_at_center) {
  const std::size_t m = g.size() - 2;
  const double h = g.spacing();
  const double d1[5] = {1 / (12 * h), -8 / (12 * h), 0, 8 / (12 * h), -1 / (12 * h)};
  const double d2[5] = {-1 / (12 * h * h), 16 / (12 * h * h), -30 / (12 * h * h),
                        16 / (12 * h * h), -1 / (12 * h * h)};
  FullBand fb(m);
  for (std::size_t r = 0; r < m; ++r) {
    fb.outer(stencil_row(r, m, d2), 1.0);
    fb.outer(stencil_row(r, m, d1), 1.0);
    fb.at(r, r) += identity;
  }
  if (point_at_center != 0.0) fb.at(g.center() - 1, g.center() - 1) += point_at_center;
  return fb;
}

SymBandMatrix to_symmetric(FullBand& fb, double* defect) {
  SymBandMatrix a(fb.m, kBand);
  double worst = 0.0;
  for (std::size_t j = 0; j < fb.m; ++j)
    for (std::size_t i = j; i < std::min(fb.m, j + kBand + 1); ++i) {
      worst = std::max(worst, std::abs(fb.at(i, j) - fb.at(j, i)));
      a.add(i, j, 0.5 * (fb.at(i, j) + fb.at(j, i)));
    }
  if (defect) *defect = worst;
  return a;
}

}  // namespace

OperatorMatrix assemble(OperatorKind kind, const Coefficients& c, const Grid& g) {
  if (g.size() < 201) raise(Errc::GridTooSmall, "assemble needs at least 201 nodes");
  const std::size_t m = g.size() - 2;
  const double h = g.spacing();
  const double d1[5] = {1 / (12 * h), -8 / (12 * h), 0, 8 / (12 * h), -1 / (12 * h)};
  const double d2[5] = {-1 / (12 * h * h), 16 / (12 * h * h), -30 / (12 * h * h),
                        16 / (12 * h * h), -1 / (12 * h * h)};
  FullBand fb(m);
  for (std::size_t r = 0; r < m; ++r) {
    if (c.c4 != 0.0) fb.outer(stencil_row(r, m, d2), c.c4);
    fb.outer(stencil_row(r, m, d1), c.a[r + 1]);
    fb.at(r, r) += c.b[r + 1];
  }
  double defect = 0.0;
  SymBandMatrix a = to_symmetric(fb, &defect);
  return OperatorMatrix(kind, g, std::move(a), defect);
}

OperatorMatrix assemble(OperatorKind kind, const Grid& g) {
  return assemble(kind, coefficients(kind, g), g);
}

// --- spectra ----------------------------------------------------------------

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void scale(std::vector<double>& a, double s) {
  for (double& x : a) x *= s;
}

// Inverse iteration for A x = lambda B x (B = identity when null), keeping x
// B-orthogonal to the given vectors.
std::vector<double> inverse_iteration(const SymBandMatrix& a, const SymBandMatrix* b, double lambda,
                                      const std::vector<std::vector<double>>& against) {
  const std::size_t n = a.size();
  double shift = lambda;
  const double bump = 1e-12 * std::max(1.0, a.norm_inf());
  std::optional<BandLU> lu;
  for (int attempt = 0; attempt < 8; ++attempt) {
    lu.emplace(a, shift, b);
    if (!lu->singular()) break;
    shift -= bump * std::pow(10.0, attempt);
  }
  if (lu->singular()) raise(Errc::NoConvergence, "inverse iteration: singular shift");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(0.37 * static_cast<double>(i));
  auto bx = [&](const std::vector<double>& v) { return b ? b->multiply(v) : v; };
  for (int it = 0; it < 6; ++it) {
    std::vector<double> y = bx(x);
    lu->solve(y);
    for (const auto& q : against) {
      const auto bq = bx(q);
      const double c = dot(bq, y) / dot(bq, q);
      for (std::size_t i = 0; i < n; ++i) y[i] -= c * q[i];
    }
    scale(y, 1.0 / std::sqrt(dot(y, bx(y))));
    x = std::move(y);
  }
  return x;
}

}  // namespace

SpectrumReport spectrum(const OperatorMatrix& om, std::size_t k) {
  const Grid& g = om.grid();
  if (k == 0 || k > g.size() / 4) raise(Errc::InvalidArgument, "spectrum needs 1 <= k <= N/4");
  const SymBandMatrix& a = om.matrix();
  const double anorm = a.norm_inf();
  const double edge = 0.95 * g.half_width();

  SpectrumReport rep;
  rep.kind = om.kind();
  rep.half_width = g.half_width();
  rep.matrix_norm = anorm;

  std::size_t want = k + std::min<std::size_t>(k, 8);
  for (;;) {
    want = std::min(want, a.size());
    const std::vector<double> values = a.lowest_eigenvalues(want);
    rep.pairs.clear();
    rep.discarded = 0;
    std::vector<std::vector<double>> found;
    for (std::size_t i = 0; i < values.size() && rep.pairs.size() < k; ++i) {
      // orthogonalize against every earlier vector with a nearby eigenvalue
      std::vector<std::vector<double>> close;
      for (std::size_t j = 0; j < found.size(); ++j)
        if (std::abs(values[j] - values[i]) <= 1e-6 * std::max(1.0, std::abs(values[i])))
          close.push_back(found[j]);
      std::vector<double> x = inverse_iteration(a, nullptr, values[i], close);
      found.push_back(x);

      const std::vector<double> ax = a.multiply(x);
      double res = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) res += std::pow(ax[j] - values[i] * x[j], 2);
      double outer = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j)
        if (std::abs(g.x(j + 1)) > edge) outer += x[j] * x[j];

      // x has unit Euclidean norm, so outer is the edge mass fraction
      if (outer > 0.01) {
        ++rep.discarded;
        continue;
      }
      RealField v = om.extend(x);
      v *= 1.0 / std::sqrt(norm2(v));
      rep.pairs.push_back(Eigenpair{values[i], std::move(v), std::sqrt(res), outer});
    }
    if (rep.pairs.size() >= k || want >= a.size() || want >= g.size() / 2) break;
    want *= 2;
  }
  if (rep.pairs.size() < k) raise(Errc::NoConvergence, "too many boundary modes");
  return rep;
}

std::string spectrum_csv(const SpectrumReport& r) {
  std::string out = "index,eigenvalue,residual\n";
  for (std::size_t i = 0; i < r.pairs.size(); ++i)
    out += fmt::format("{},{:.17g},{:.17g}\n", i, r.pairs[i].value, r.pairs[i].residual);
  return out;
}

std::string eigenvector_csv(const SpectrumReport& r) {
  std::string out = "x";
  for (std::size_t i = 0; i < r.pairs.size(); ++i) out += fmt::format(",v{}", i);
  out += '\n';
  if (r.pairs.empty()) return out;
  const Grid& g = r.pairs.front().vector.grid();
  for (std::size_t j = 0; j < g.size(); ++j) {
    out += fmt::format("{:.17g}", g.x(j));
    for (const auto& p : r.pairs) out += fmt::format(",{:.17g}", p.vector[j]);
    out += '\n';
  }
  return out;
}

// --- constrained Rayleigh minima -------------------------------------------

CoercivityResult coercivity_estimate(const OperatorMatrix& om, const RealField* constraint,
                                     NormKind norm) {
  const Grid& g = om.grid();
  const SymBandMatrix& a = om.matrix();
  FullBand nb = norm == NormKind::H2 ? norm_band(g, 1.0, 0.0)
                                     : norm_band(g, 0.0, 1.0 / g.spacing());
  // both norms carry |v_x|^2 + |v_xx|^2; H2 adds |v|^2, the weak one |v(0)|^2
  const SymBandMatrix nmat = to_symmetric(nb, nullptr);

  CoercivityResult res;
  const auto lam = a.lowest_generalized(nmat, 2);
  res.lambda1 = lam[0];
  res.lambda2 = lam[1];
  if (!constraint) {
    res.value = lam[0];
    return res;
  }
  res.constrained = true;
  const std::vector<double> c = om.restrict_to_interior(*constraint);
  const double cnorm = std::sqrt(dot(c, c));

  const std::vector<double> x1 = inverse_iteration(a, &nmat, lam[0], {});
  const auto weight = [&](const std::vector<double>& x) {
    return std::abs(dot(c, x)) / (cnorm * std::sqrt(dot(x, x)));
  };
  if (weight(x1) < 1e-8) {
    res.value = lam[0];
    return res;
  }
  const std::vector<double> x2 = inverse_iteration(a, &nmat, lam[1], {x1});
  if (weight(x2) < 1e-8) {
    res.value = lam[1];
    return res;
  }

  // g(l) = c^T (A - l N)^{-1} c increases from -inf to +inf on (l1, l2).
  auto secular = [&](double l) {
    ++res.evaluations;
    BandLU lu(a, l, &nmat);
    std::vector<double> y = c;
    lu.solve(y);
    return dot(c, y);
  };
  const double gap = lam[1] - lam[0];
  double lo = lam[0] + 1e-12 * std::max(1.0, gap), hi = lam[1] - 1e-12 * std::max(1.0, gap);
  double glo = secular(lo), ghi = secular(hi);
  if (glo >= 0.0) {
    res.value = lo;
    return res;
  }
  if (ghi <= 0.0) {
    res.value = hi;
    return res;
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      secular, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(50), iters);
  res.value = 0.5 * (r.first + r.second);
  return res;
}

}  // namespace nlslab
