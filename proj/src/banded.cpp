#include "nlslab/banded.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "nlslab/error.hpp"

namespace nlslab {

SymBandMatrix::SymBandMatrix(std::size_t n, std::size_t kd)
    : n_(n), kd_(kd), ab_((kd + 1) * n, 0.0) {}

double SymBandMatrix::operator()(std::size_t i, std::size_t j) const noexcept {
  if (i < j) std::swap(i, j);
  if (i - j > kd_) return 0.0;
  return ab_[(i - j) + j * (kd_ + 1)];
}

void SymBandMatrix::add(std::size_t i, std::size_t j, double v) noexcept {
  if (i < j) std::swap(i, j);
  ab_[(i - j) + j * (kd_ + 1)] += v;
}

std::vector<double> SymBandMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const double* col = &ab_[j * (kd_ + 1)];
    y[j] += col[0] * x[j];
    const std::size_t hi = std::min(kd_, n_ - 1 - j);
    for (std::size_t d = 1; d <= hi; ++d) {
      y[j + d] += col[d] * x[j];
      y[j] += col[d] * x[j + d];
    }
  }
  return y;
}

double SymBandMatrix::quadratic(const std::vector<double>& x) const {
  const auto y = multiply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += x[i] * y[i];
  return s;
}

double SymBandMatrix::norm_inf() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    const std::size_t lo = i >= kd_ ? i - kd_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + kd_);
    for (std::size_t j = lo; j <= hi; ++j) s += std::abs((*this)(i, j));
    worst = std::max(worst, s);
  }
  return worst;
}

std::vector<double> SymBandMatrix::lowest_eigenvalues(std::size_t k) const {
  if (k == 0) return {};
  std::vector<double> ab = ab_;
  std::vector<double> w(n_);
  std::vector<lapack_int> ifail(n_);
  lapack_int m = 0;
  double q = 0.0, z = 0.0;
  const lapack_int info = LAPACKE_dsbevx(
      LAPACK_COL_MAJOR, 'N', 'I', 'L', static_cast<lapack_int>(n_), static_cast<lapack_int>(kd_),
      ab.data(), static_cast<lapack_int>(kd_ + 1), &q, 1, 0.0, 0.0, 1, static_cast<lapack_int>(k),
      0.0, &m, w.data(), &z, 1, ifail.data());
  if (info != 0 || static_cast<std::size_t>(m) != k)
    raise(Errc::NoConvergence, "dsbevx failed, info = " + std::to_string(info));
  w.resize(k);
  return w;
}

std::vector<double> SymBandMatrix::lowest_generalized(const SymBandMatrix& b, std::size_t k) const {
  if (b.n_ != n_) raise(Errc::InvalidArgument, "generalized problem needs equal sizes");
  if (k == 0) return {};
  std::vector<double> ab = ab_, bb = b.ab_;
  std::vector<double> w(n_);
  std::vector<lapack_int> ifail(n_);
  lapack_int m = 0;
  double q = 0.0, z = 0.0;
  const lapack_int info = LAPACKE_dsbgvx(
      LAPACK_COL_MAJOR, 'N', 'I', 'L', static_cast<lapack_int>(n_), static_cast<lapack_int>(kd_),
      static_cast<lapack_int>(b.kd_), ab.data(), static_cast<lapack_int>(kd_ + 1), bb.data(),
      static_cast<lapack_int>(b.kd_ + 1), &q, 1, 0.0, 0.0, 1, static_cast<lapack_int>(k), 0.0, &m,
      w.data(), &z, 1, ifail.data());
  if (info != 0 || static_cast<std::size_t>(m) != k)
    raise(Errc::NoConvergence, "dsbgvx failed, info = " + std::to_string(info));
  w.resize(k);
  return w;
}

BandLU::BandLU(const SymBandMatrix& a, double sigma, const SymBandMatrix* b)
    : n_(a.n_), k_(b ? std::max(a.kd_, b->kd_) : a.kd_) {
  const std::size_t ld = 3 * k_ + 1;
  ab_.assign(ld * n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t lo = j >= k_ ? j - k_ : 0;
    const std::size_t hi = std::min(n_ - 1, j + k_);
    for (std::size_t i = lo; i <= hi; ++i) {
      double v = a(i, j);
      if (b)
        v -= sigma * (*b)(i, j);
      else if (i == j)
        v -= sigma;
      ab_[(2 * k_ + i - j) + j * ld] = v;
    }
  }
  ipiv_.resize(n_);
  const lapack_int info =
      LAPACKE_dgbtrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(n_), static_cast<lapack_int>(n_),
                     static_cast<lapack_int>(k_), static_cast<lapack_int>(k_), ab_.data(),
                     static_cast<lapack_int>(ld), ipiv_.data());
  if (info < 0) raise(Errc::LinearSolveFailure, "dgbtrf argument error");
  singular_ = info > 0;
}

void BandLU::solve(std::vector<double>& rhs) const {
  if (singular_) raise(Errc::LinearSolveFailure, "band matrix is singular");
  const lapack_int info = LAPACKE_dgbtrs(
      LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n_), static_cast<lapack_int>(k_),
      static_cast<lapack_int>(k_), 1, ab_.data(), static_cast<lapack_int>(3 * k_ + 1),
      ipiv_.data(), rhs.data(), static_cast<lapack_int>(n_));
  if (info != 0) raise(Errc::LinearSolveFailure, "dgbtrs failed");
}

void ComplexBandLU::factor() {
  ipiv_.resize(n_);
  const lapack_int info =
      LAPACKE_zgbtrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(n_), static_cast<lapack_int>(n_),
                     static_cast<lapack_int>(k_), static_cast<lapack_int>(k_), ab_.data(),
                     static_cast<lapack_int>(3 * k_ + 1), ipiv_.data());
  if (info != 0)
    raise(Errc::LinearSolveFailure, "zgbtrf failed, info = " + std::to_string(info));
}

void ComplexBandLU::solve(std::vector<cplx>& rhs) const {
  const lapack_int info = LAPACKE_zgbtrs(
      LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n_), static_cast<lapack_int>(k_),
      static_cast<lapack_int>(k_), 1, ab_.data(), static_cast<lapack_int>(3 * k_ + 1),
      ipiv_.data(), rhs.data(), static_cast<lapack_int>(n_));
  if (info != 0) raise(Errc::LinearSolveFailure, "zgbtrs failed");
}

}  // namespace nlslab
