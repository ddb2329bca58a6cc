#pragma once
// Uniform grid on [-L, L], sampled fields, finite differences and quadrature.

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nlslab/error.hpp"

namespace nlslab {

using cplx = std::complex<double>;

/// Symmetric uniform grid with an odd number of nodes, so x = 0 is a node.
/// Cheap to copy: the node and weight tables are shared.
class Grid {
 public:
  Grid(double half_width, std::size_t points);

  std::size_t size() const noexcept { return d_->n; }
  double spacing() const noexcept { return d_->h; }
  /// Stored as center()*spacing(), so spacing()*(size()-1) == 2*half_width() exactly.
  double half_width() const noexcept { return d_->half_width; }
  std::size_t center() const noexcept { return (d_->n - 1) / 2; }
  double x(std::size_t j) const noexcept { return d_->nodes[j]; }
  std::span<const double> nodes() const noexcept { return d_->nodes; }
  std::span<const double> simpson_weights() const noexcept { return d_->weights; }

  std::optional<std::size_t> find_node(double coord) const noexcept;
  /// Throws NotOnGrid when coord is not a node (tolerance 1e-9 h).
  std::size_t index_of(double coord) const;

  bool operator==(const Grid& other) const noexcept {
    return d_ == other.d_ || (d_->n == other.d_->n && d_->h == other.d_->h);
  }

 private:
  struct Data {
    std::size_t n;
    double h;
    double half_width;
    std::vector<double> nodes;
    std::vector<double> weights;
  };
  std::shared_ptr<const Data> d_;
};

template <class T>
class Field {
 public:
  using value_type = T;

  explicit Field(Grid g) : grid_(std::move(g)), v_(grid_.size(), T{}) {}
  Field(Grid g, std::vector<T> samples) : grid_(std::move(g)), v_(std::move(samples)) {
    if (v_.size() != grid_.size())
      raise(Errc::InvalidArgument, "sample count does not match grid size");
  }

  template <class F>
  static Field sample(const Grid& g, F&& f) {
    Field out(g);
    for (std::size_t j = 0; j < g.size(); ++j) out.v_[j] = f(g.x(j));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return v_.size(); }
  const T* data() const noexcept { return v_.data(); }
  T* data() noexcept { return v_.data(); }
  std::span<const T> values() const noexcept { return v_; }
  std::span<T> values() noexcept { return v_; }
  const T& operator[](std::size_t j) const noexcept { return v_[j]; }
  T& operator[](std::size_t j) noexcept { return v_[j]; }
  const T& front() const noexcept { return v_.front(); }
  const T& back() const noexcept { return v_.back(); }

  bool all_finite() const noexcept {
    for (const T& s : v_)
      if (!is_finite(s)) return false;
    return true;
  }

  Field& operator+=(const Field& o) {
    check(o);
    for (std::size_t j = 0; j < v_.size(); ++j) v_[j] += o.v_[j];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check(o);
    for (std::size_t j = 0; j < v_.size(); ++j) v_[j] -= o.v_[j];
    return *this;
  }
  Field& operator*=(T s) {
    for (T& x : v_) x *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, T s) { return a *= s; }
  friend Field operator*(T s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= T(-1); }

  void check(const Field& o) const {
    if (!(grid_ == o.grid_)) raise(Errc::GridMismatch, "fields live on different grids");
  }

 private:
  static bool is_finite(double s) { return std::isfinite(s); }
  static bool is_finite(const cplx& s) { return std::isfinite(s.real()) && std::isfinite(s.imag()); }

  Grid grid_;
  std::vector<T> v_;
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

RealField real_part(const ComplexField& z);
RealField imag_part(const ComplexField& z);
ComplexField make_complex(const RealField& re, const RealField& im);
RealField abs2(const ComplexField& z);
RealField pointwise_product(const RealField& a, const RealField& b);
double max_abs(const RealField& f);
double max_abs(const ComplexField& f);
double max_abs_diff(const RealField& a, const RealField& b);
double max_abs_diff(const ComplexField& a, const ComplexField& b);

/// 8th-order central differences; 10-point one-sided closures at the four
/// outermost nodes on each side. order is 1 or 2. Requires N >= 9.
RealField diff(const RealField& f, int order);
ComplexField diff(const ComplexField& f, int order);

/// Composite Simpson rule over [-L, L].
double integrate(const RealField& f);
cplx integrate(const ComplexField& f);
/// L2 inner product <a, b> by Simpson.
double inner(const RealField& a, const RealField& b);
/// integral of |z|^2 by Simpson.
double norm2(const ComplexField& z);
double norm2(const RealField& f);

/// Simpson over [a, b]; a and b must be nodes. An odd interval count ends
/// with a 3/8-rule panel; a single interval falls back to the trapezoid.
double integrate_window(const RealField& f, double a, double b);
double integrate_between(const RealField& f, std::size_t ia, std::size_t ib);

/// F(x_j) = integral from 0 to x_j of f (6th-order per-interval rule).
RealField cumulative_from_center(const RealField& f);

/// g(x_j) = f(x_j + shift) by 8-point Lagrange interpolation; points beyond
/// the domain take the nearest boundary value.
RealField shifted(const RealField& f, double shift);
ComplexField shifted(const ComplexField& f, double shift);

/// Finite-difference weights (Fornberg) for derivatives 0..max_order at z
/// from the given abscissae. Result is indexed [order][point].
std::vector<std::vector<double>> fd_weights(double z, std::span<const double> xs, int max_order);

}  // namespace nlslab
