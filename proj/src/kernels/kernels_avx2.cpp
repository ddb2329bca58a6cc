// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "nlslab/kernels.hpp"

namespace nlslab::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_norm2_avx2(const double* w, const cplx* z, std::size_t n) {
  const double* zd = reinterpret_cast<const double*>(z);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // (w0, w0, w1, w1) against (re0, im0, re1, im1)
    const __m256d ww =
        _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0b01010000);
    const __m256d zz = _mm256_loadu_pd(zd + 2 * i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(ww, zz), zz, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * std::norm(z[i]);
  return s;
}

void stencil9_avx2(const double* in, double* out, std::size_t n_out, const double* c) {
  __m256d cv[9];
  for (int k = 0; k < 9; ++k) cv[k] = _mm256_set1_pd(c[k]);
  std::size_t i = 0;
  for (; i + 4 <= n_out; i += 4) {
    const double* p = in + i;
    __m256d r = _mm256_mul_pd(cv[0], _mm256_loadu_pd(p));
    for (int k = 1; k < 9; ++k) r = _mm256_fmadd_pd(cv[k], _mm256_loadu_pd(p + k), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n_out; ++i) {
    const double* p = in + i;
    double s = c[0] * p[0];
    for (int k = 1; k < 9; ++k) s = std::fma(c[k], p[k], s);
    out[i] = s;
  }
}

void midpoint_nonlinearity_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double* ad = reinterpret_cast<const double*>(a);
  const double* bd = reinterpret_cast<const double*>(b);
  double* od = reinterpret_cast<double*>(out);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(ad + 2 * i);
    const __m256d vb = _mm256_loadu_pd(bd + 2 * i);
    const __m256d sa = _mm256_mul_pd(va, va);
    const __m256d sb = _mm256_mul_pd(vb, vb);
    // hadd(x, x) = (x0+x1, x0+x1, x2+x3, x2+x3): |z|^2 broadcast over (re, im)
    const __m256d mod2 = _mm256_add_pd(_mm256_hadd_pd(sa, sa), _mm256_hadd_pd(sb, sb));
    const __m256d g = _mm256_fnmadd_pd(half, mod2, one);
    const __m256d r = _mm256_mul_pd(_mm256_mul_pd(half, g), _mm256_add_pd(va, vb));
    _mm256_storeu_pd(od + 2 * i, r);
  }
  for (; i < n; ++i) {
    const double g = 1.0 - 0.5 * (std::norm(a[i]) + std::norm(b[i]));
    out[i] = (0.5 * g) * (a[i] + b[i]);
  }
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", dot_avx2, weighted_norm2_avx2, stencil9_avx2,
                                 midpoint_nonlinearity_avx2};
  return table;
}

}  // namespace nlslab::kernels
