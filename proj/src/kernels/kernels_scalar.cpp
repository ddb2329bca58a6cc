#include "nlslab/kernels.hpp"

namespace nlslab::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_norm2_scalar(const double* w, const cplx* z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::norm(z[i]);
  return s;
}

void stencil9_scalar(const double* in, double* out, std::size_t n_out, const double* c) {
  for (std::size_t i = 0; i < n_out; ++i) {
    const double* p = in + i;
    double s = 0.0;
    for (int k = 0; k < 9; ++k) s += c[k] * p[k];
    out[i] = s;
  }
}

void midpoint_nonlinearity_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = 1.0 - 0.5 * (std::norm(a[i]) + std::norm(b[i]));
    out[i] = (0.5 * g) * (a[i] + b[i]);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, weighted_norm2_scalar, stencil9_scalar,
                                 midpoint_nonlinearity_scalar};
  return table;
}

}  // namespace nlslab::kernels
