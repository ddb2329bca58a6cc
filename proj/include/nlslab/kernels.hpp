#pragma once
// Data-parallel inner loops. Each kernel has a scalar reference implementation
// and, on x86-64, an AVX2/FMA variant; the variant is picked once at startup.

#include <complex>
#include <cstddef>
#include <string_view>

namespace nlslab::kernels {

using cplx = std::complex<double>;

/// sum_i a[i] * b[i]
using DotFn = double (*)(const double* a, const double* b, std::size_t n);

/// sum_i w[i] * |z[i]|^2
using WeightedNorm2Fn = double (*)(const double* w, const cplx* z, std::size_t n);

/// out[i] = sum_{k<9} coef[k] * in[i + k]   for i in [0, n_out)
using Stencil9Fn = void (*)(const double* in, double* out, std::size_t n_out,
                            const double* coef);

/// out[i] = (1 - (|a[i]|^2 + |b[i]|^2)/2) * (a[i] + b[i])/2
using MidpointNonlinearityFn = void (*)(const cplx* a, const cplx* b, cplx* out,
                                        std::size_t n);

struct KernelTable {
  std::string_view name;
  DotFn dot;
  WeightedNorm2Fn weighted_norm2;
  Stencil9Fn stencil9;
  MidpointNonlinearityFn midpoint_nonlinearity;
};

const KernelTable& scalar_table();

/// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table();

/// Table used by the library. AVX2 when available unless the environment
/// variable NLSLAB_SIMD is set to "scalar".
const KernelTable& active();

}  // namespace nlslab::kernels
