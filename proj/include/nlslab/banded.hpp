#pragma once
// Thin wrappers over LAPACK band routines.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <vector>

namespace nlslab {

/// Symmetric band matrix, lower triangle in LAPACK column-major band storage.
class SymBandMatrix {
 public:
  SymBandMatrix(std::size_t n, std::size_t kd);

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return kd_; }
  /// A(i, j) for |i - j| <= kd, zero outside the band.
  double operator()(std::size_t i, std::size_t j) const noexcept;
  /// Adds to the stored entry (i, j) or (j, i), whichever is in the lower part.
  void add(std::size_t i, std::size_t j, double v) noexcept;

  std::vector<double> multiply(const std::vector<double>& x) const;
  double quadratic(const std::vector<double>& x) const;
  double norm_inf() const;

  const std::vector<double>& storage() const noexcept { return ab_; }

  /// k smallest eigenvalues (dsbevx).
  std::vector<double> lowest_eigenvalues(std::size_t k) const;
  /// k smallest generalized eigenvalues of (A, B), B positive definite (dsbgvx).
  std::vector<double> lowest_generalized(const SymBandMatrix& b, std::size_t k) const;

  friend class BandLU;

 private:
  std::size_t n_, kd_;
  std::vector<double> ab_;
};

/// LU factorization of A - sigma B (B may be null for the identity).
class BandLU {
 public:
  BandLU(const SymBandMatrix& a, double sigma, const SymBandMatrix* b = nullptr);
  /// Whether dgbtrf found an exactly zero pivot.
  bool singular() const noexcept { return singular_; }
  void solve(std::vector<double>& rhs) const;

 private:
  std::size_t n_, k_;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
  bool singular_ = false;
};

/// LU factorization of a complex band matrix given row by row as diagonals.
class ComplexBandLU {
 public:
  using cplx = std::complex<double>;
  /// entry(i, j) for |i - j| <= k supplies the matrix.
  template <class Entry>
  ComplexBandLU(std::size_t n, std::size_t k, Entry&& entry) : n_(n), k_(k) {
    const std::size_t ld = 3 * k + 1;
    ab_.assign(ld * n, cplx{});
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lo = j >= k ? j - k : 0;
      const std::size_t hi = std::min(n - 1, j + k);
      for (std::size_t i = lo; i <= hi; ++i) ab_[(2 * k + i - j) + j * ld] = entry(i, j);
    }
    factor();
  }
  void solve(std::vector<cplx>& rhs) const;

 private:
  void factor();
  std::size_t n_, k_;
  std::vector<cplx> ab_;
  std::vector<int> ipiv_;
};

}  // namespace nlslab
