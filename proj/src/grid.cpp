#include "nlslab/grid.hpp"

#include <algorithm>
#include <array>

#include "nlslab/kernels.hpp"

namespace nlslab {

Grid::Grid(double half_width, std::size_t points) {
  if (points < 3 || points % 2 == 0)
    raise(Errc::InvalidGrid, "point count must be odd and at least 3");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    raise(Errc::InvalidGrid, "half width must be positive");
  auto d = std::make_shared<Data>();
  const std::size_t c = (points - 1) / 2;
  d->n = points;
  d->h = 2.0 * half_width / static_cast<double>(points - 1);
  d->half_width = static_cast<double>(c) * d->h;
  d->nodes.resize(points);
  for (std::size_t j = 0; j < points; ++j)
    d->nodes[j] = (static_cast<double>(j) - static_cast<double>(c)) * d->h;
  d->weights.assign(points, 0.0);
  const double third = d->h / 3.0;
  for (std::size_t j = 0; j < points; ++j) {
    if (j == 0 || j == points - 1)
      d->weights[j] = third;
    else
      d->weights[j] = (j % 2 == 1 ? 4.0 : 2.0) * third;
  }
  d_ = std::move(d);
}

std::optional<std::size_t> Grid::find_node(double coord) const noexcept {
  const double s = coord / d_->h + static_cast<double>(center());
  const double r = std::round(s);
  if (r < 0.0 || r > static_cast<double>(d_->n - 1)) return std::nullopt;
  if (std::abs(s - r) > 1e-9) return std::nullopt;
  return static_cast<std::size_t>(r);
}

std::size_t Grid::index_of(double coord) const {
  auto j = find_node(coord);
  if (!j) raise(Errc::NotOnGrid, "coordinate is not a grid node");
  return *j;
}

RealField real_part(const ComplexField& z) {
  RealField out(z.grid());
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j].real();
  return out;
}

RealField imag_part(const ComplexField& z) {
  RealField out(z.grid());
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j].imag();
  return out;
}

ComplexField make_complex(const RealField& re, const RealField& im) {
  re.check(im);
  ComplexField out(re.grid());
  for (std::size_t j = 0; j < re.size(); ++j) out[j] = {re[j], im[j]};
  return out;
}

RealField abs2(const ComplexField& z) {
  RealField out(z.grid());
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = std::norm(z[j]);
  return out;
}

RealField pointwise_product(const RealField& a, const RealField& b) {
  a.check(b);
  RealField out(a.grid());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
  return out;
}

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double s : f.values()) m = std::max(m, std::abs(s));
  return m;
}

double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (const cplx& s : f.values()) m = std::max(m, std::abs(s));
  return m;
}

double max_abs_diff(const RealField& a, const RealField& b) { return max_abs(a - b); }
double max_abs_diff(const ComplexField& a, const ComplexField& b) { return max_abs(a - b); }

std::vector<std::vector<double>> fd_weights(double z, std::span<const double> xs, int max_order) {
  const std::size_t n = xs.size();
  const auto m = static_cast<std::size_t>(max_order);
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

constexpr std::array<double, 9> kCentral1{1.0 / 280,  -4.0 / 105, 1.0 / 5,    -4.0 / 5, 0.0,
                                          4.0 / 5,    -1.0 / 5,   4.0 / 105,  -1.0 / 280};
constexpr std::array<double, 9> kCentral2{-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                                          8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
constexpr std::size_t kClosurePoints = 10;
constexpr std::size_t kBoundaryNodes = 4;

using ClosureTable = std::vector<std::vector<double>>;

// One-sided weights (unit spacing) for the four nodes next to the left end;
// the right end reuses them mirrored (with a sign flip for odd orders).
ClosureTable make_closure(int ord, std::size_t points) {
  std::vector<double> xs(points);
  for (std::size_t i = 0; i < points; ++i) xs[i] = static_cast<double>(i);
  ClosureTable out;
  for (std::size_t b = 0; b < kBoundaryNodes; ++b)
    out.push_back(fd_weights(static_cast<double>(b), xs, ord)[static_cast<std::size_t>(ord)]);
  return out;
}

const ClosureTable& closure(int order) {
  static const ClosureTable first = make_closure(1, kClosurePoints);
  static const ClosureTable second = make_closure(2, kClosurePoints);
  return order == 1 ? first : second;
}

void diff_samples(const double* in, double* out, std::size_t n, double h, int order) {
  const double scale = order == 1 ? 1.0 / h : 1.0 / (h * h);
  const double sign = order == 1 ? -1.0 : 1.0;
  ClosureTable small;
  if (n < kClosurePoints) small = make_closure(order, n);
  const ClosureTable& cl = n < kClosurePoints ? small : closure(order);
  const auto& central = order == 1 ? kCentral1 : kCentral2;
  std::array<double, 9> coef{};
  for (std::size_t k = 0; k < 9; ++k) coef[k] = central[k] * scale;
  kernels::active().stencil9(in, out + kBoundaryNodes, n - 2 * kBoundaryNodes, coef.data());
  for (std::size_t b = 0; b < kBoundaryNodes; ++b) {
    // weights sum to zero; differencing against the own sample keeps
    // constants exact despite the large one-sided coefficients
    double left = 0.0;
    double right = 0.0;
    for (std::size_t i = 0; i < cl[b].size(); ++i) {
      left += cl[b][i] * (in[i] - in[b]);
      right += cl[b][i] * (in[n - 1 - i] - in[n - 1 - b]);
    }
    out[b] = left * scale;
    out[n - 1 - b] = sign * right * scale;
  }
}

void require_diff_size(std::size_t n) {
  if (n < 9) raise(Errc::GridTooSmall, "finite differences need at least 9 nodes");
}

}  // namespace

RealField diff(const RealField& f, int order) {
  if (order != 1 && order != 2) raise(Errc::InvalidArgument, "diff order must be 1 or 2");
  require_diff_size(f.size());
  RealField out(f.grid());
  diff_samples(f.data(), out.data(), f.size(), f.grid().spacing(), order);
  return out;
}

ComplexField diff(const ComplexField& f, int order) {
  RealField re = diff(real_part(f), order);
  RealField im = diff(imag_part(f), order);
  return make_complex(re, im);
}

double integrate(const RealField& f) {
  const auto w = f.grid().simpson_weights();
  return kernels::active().dot(w.data(), f.data(), f.size());
}

cplx integrate(const ComplexField& f) {
  return {integrate(real_part(f)), integrate(imag_part(f))};
}

double inner(const RealField& a, const RealField& b) {
  a.check(b);
  return integrate(pointwise_product(a, b));
}

double norm2(const ComplexField& z) {
  const auto w = z.grid().simpson_weights();
  return kernels::active().weighted_norm2(w.data(), z.data(), z.size());
}

double norm2(const RealField& f) { return inner(f, f); }

double integrate_between(const RealField& f, std::size_t ia, std::size_t ib) {
  if (ib <= ia || ib >= f.size()) raise(Errc::InvalidArgument, "window needs a < b on the grid");
  const double h = f.grid().spacing();
  const std::size_t m = ib - ia;
  if (m == 1) return 0.5 * h * (f[ia] + f[ib]);
  const std::size_t simpson_end = (m % 2 == 0) ? ib : ib - 3;
  double s = 0.0;
  if (simpson_end > ia) {
    s = f[ia] + f[simpson_end];
    for (std::size_t j = ia + 1; j < simpson_end; ++j) s += ((j - ia) % 2 == 1 ? 4.0 : 2.0) * f[j];
    s *= h / 3.0;
  }
  if (simpson_end != ib) {
    const std::size_t j = simpson_end;
    s += 3.0 * h / 8.0 * (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]);
  }
  return s;
}

double integrate_window(const RealField& f, double a, double b) {
  const std::size_t ia = f.grid().index_of(a);
  const std::size_t ib = f.grid().index_of(b);
  if (ib <= ia) raise(Errc::InvalidArgument, "integration window needs a < b");
  return integrate_between(f, ia, ib);
}

namespace {

// Weights (in units of h) of the integral over [0, 1] of the quintic through
// the nodes first, ..., first + 5. Three-point Gauss-Legendre is exact here.
std::array<double, 6> interval_weights(int first) {
  const double g = std::sqrt(0.6);
  const double gx[3] = {0.5 * (1.0 - g), 0.5, 0.5 * (1.0 + g)};
  const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  std::array<double, 6> w{};
  for (int i = 0; i < 6; ++i)
    for (int q = 0; q < 3; ++q) {
      double l = 1.0;
      for (int k = 0; k < 6; ++k)
        if (k != i) l *= (gx[q] - (first + k)) / static_cast<double>(i - k);
      w[static_cast<std::size_t>(i)] += gw[q] * l;
    }
  return w;
}

}  // namespace

RealField cumulative_from_center(const RealField& f) {
  const std::size_t n = f.size();
  const std::size_t c = f.grid().center();
  const double h = f.grid().spacing();
  if (n < 6) raise(Errc::GridTooSmall, "cumulative integral needs at least 6 nodes");
  static const std::array<std::array<double, 6>, 5> table = {
      interval_weights(0), interval_weights(-1), interval_weights(-2), interval_weights(-3),
      interval_weights(-4)};
  // Integral over [x_j, x_{j+1}] from six nodes, centred where possible.
  auto interval = [&](std::size_t j) {
    std::size_t first = j >= 2 ? j - 2 : 0;
    if (first + 6 > n) first = n - 6;
    const auto& w = table[j - first];
    double s = 0.0;
    for (std::size_t k = 0; k < 6; ++k) s += w[k] * f[first + k];
    return h * s;
  };
  RealField out(f.grid());
  for (std::size_t j = c; j + 1 < n; ++j) out[j + 1] = out[j] + interval(j);
  for (std::size_t j = c; j > 0; --j) out[j - 1] = out[j] - interval(j - 1);
  return out;
}

namespace {

template <class T>
Field<T> shifted_impl(const Field<T>& f, double shift) {
  const Grid& g = f.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  constexpr std::size_t kPts = 8;
  Field<T> out(g);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.x(j) + shift;
    if (x <= g.x(0)) {
      out[j] = f[0];
      continue;
    }
    if (x >= g.x(n - 1)) {
      out[j] = f[n - 1];
      continue;
    }
    const double s = (x - g.x(0)) / h;
    const auto base = static_cast<std::ptrdiff_t>(std::floor(s));
    if (std::abs(s - std::round(s)) < 1e-12) {
      out[j] = f[static_cast<std::size_t>(std::llround(s))];
      continue;
    }
    std::ptrdiff_t lo = base - static_cast<std::ptrdiff_t>(kPts / 2) + 1;
    lo = std::clamp<std::ptrdiff_t>(lo, 0, static_cast<std::ptrdiff_t>(n - kPts));
    T acc{};
    for (std::size_t a = 0; a < kPts; ++a) {
      double l = 1.0;
      const double ta = static_cast<double>(lo + static_cast<std::ptrdiff_t>(a));
      for (std::size_t b = 0; b < kPts; ++b) {
        if (a == b) continue;
        const double tb = static_cast<double>(lo + static_cast<std::ptrdiff_t>(b));
        l *= (s - tb) / (ta - tb);
      }
      acc += l * f[static_cast<std::size_t>(lo) + a];
    }
    out[j] = acc;
  }
  return out;
}

}  // namespace

RealField shifted(const RealField& f, double shift) { return shifted_impl(f, shift); }
ComplexField shifted(const ComplexField& f, double shift) { return shifted_impl(f, shift); }

}  // namespace nlslab
