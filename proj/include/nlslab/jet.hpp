#pragma once
// A field together with its first few x-derivatives. Closed-form sources
// (soliton profiles, Gaussian sums, phase ramps) fill the derivatives exactly;
// from_samples() falls back to finite differences.

#include <algorithm>
#include <type_traits>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

template <class T>
class Jet {
 public:
  explicit Jet(std::vector<Field<T>> derivatives) : d_(std::move(derivatives)) {
    if (d_.empty()) raise(Errc::InvalidArgument, "jet needs at least the field itself");
    for (const auto& f : d_) d_.front().check(f);
  }

  /// Derivatives up to `order` (<= 4) by finite differences of the samples.
  static Jet from_samples(const Field<T>& f, int order) {
    std::vector<Field<T>> d{f};
    if (order >= 1) d.push_back(diff(f, 1));
    if (order >= 2) d.push_back(diff(f, 2));
    if (order >= 3) d.push_back(diff(d[2], 1));
    if (order >= 4) d.push_back(diff(d[2], 2));
    return Jet(std::move(d));
  }

  static Jet zero(const Grid& g, int order) {
    return Jet(std::vector<Field<T>>(static_cast<std::size_t>(order) + 1, Field<T>(g)));
  }

  const Grid& grid() const noexcept { return d_.front().grid(); }
  int order() const noexcept { return static_cast<int>(d_.size()) - 1; }
  const Field<T>& operator[](int k) const {
    require(k);
    return d_[static_cast<std::size_t>(k)];
  }
  const Field<T>& value() const noexcept { return d_[0]; }
  const Field<T>& dx() const { return (*this)[1]; }
  const Field<T>& dxx() const { return (*this)[2]; }

  void require(int k) const {
    if (k < 0 || k > order()) raise(Errc::InvalidArgument, "jet does not carry that derivative");
  }

  /// The jet of the first derivative (one order less).
  Jet derivative() const {
    require(1);
    return Jet(std::vector<Field<T>>(d_.begin() + 1, d_.end()));
  }

  Jet truncated(int order) const {
    require(order);
    return Jet(std::vector<Field<T>>(d_.begin(), d_.begin() + order + 1));
  }

  Jet& operator+=(const Jet& o) {
    const std::size_t m = std::min(d_.size(), o.d_.size());
    d_.resize(m, Field<T>(grid()));
    for (std::size_t k = 0; k < m; ++k) d_[k] += o.d_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    const std::size_t m = std::min(d_.size(), o.d_.size());
    d_.resize(m, Field<T>(grid()));
    for (std::size_t k = 0; k < m; ++k) d_[k] -= o.d_[k];
    return *this;
  }
  Jet& operator*=(T s) {
    for (auto& f : d_) f *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, T s) { return a *= s; }
  friend Jet operator*(T s, Jet a) { return a *= s; }

 private:
  std::vector<Field<T>> d_;
};

using RealJet = Jet<double>;
using ComplexJet = Jet<cplx>;

/// Leibniz rule, up to the lower of the two orders.
RealJet product(const RealJet& a, const RealJet& b);
ComplexJet product(const ComplexJet& a, const ComplexJet& b);

ComplexJet to_complex(const RealJet& re);
ComplexJet make_complex(const RealJet& re, const RealJet& im);
RealJet real_part(const ComplexJet& z);
RealJet imag_part(const ComplexJet& z);

/// exp(i * phase) with derivatives up to min(phase.order(), 2).
ComplexJet exp_i(const RealJet& phase);

}  // namespace nlslab
