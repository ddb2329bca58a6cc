#include "nlslab/jet.hpp"

namespace nlslab {
namespace {

template <class T>
Jet<T> leibniz(const Jet<T>& a, const Jet<T>& b) {
  const int m = std::min(a.order(), b.order());
  std::vector<Field<T>> d;
  for (int k = 0; k <= m; ++k) {
    Field<T> s(a.grid());
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
      const auto& fa = a[i];
      const auto& fb = b[k - i];
      for (std::size_t j = 0; j < s.size(); ++j) s[j] += binom * fa[j] * fb[j];
      binom = binom * static_cast<double>(k - i) / static_cast<double>(i + 1);
    }
    d.push_back(std::move(s));
  }
  return Jet<T>(std::move(d));
}

}  // namespace

RealJet product(const RealJet& a, const RealJet& b) { return leibniz(a, b); }
ComplexJet product(const ComplexJet& a, const ComplexJet& b) { return leibniz(a, b); }

ComplexJet to_complex(const RealJet& re) {
  std::vector<ComplexField> d;
  for (int k = 0; k <= re.order(); ++k) d.push_back(make_complex(re[k], RealField(re.grid())));
  return ComplexJet(std::move(d));
}

ComplexJet make_complex(const RealJet& re, const RealJet& im) {
  const int m = std::min(re.order(), im.order());
  std::vector<ComplexField> d;
  for (int k = 0; k <= m; ++k) d.push_back(make_complex(re[k], im[k]));
  return ComplexJet(std::move(d));
}

RealJet real_part(const ComplexJet& z) {
  std::vector<RealField> d;
  for (int k = 0; k <= z.order(); ++k) d.push_back(real_part(z[k]));
  return RealJet(std::move(d));
}

RealJet imag_part(const ComplexJet& z) {
  std::vector<RealField> d;
  for (int k = 0; k <= z.order(); ++k) d.push_back(imag_part(z[k]));
  return RealJet(std::move(d));
}

ComplexJet exp_i(const RealJet& phase) {
  const Grid& g = phase.grid();
  const int m = std::min(phase.order(), 2);
  std::vector<ComplexField> d(static_cast<std::size_t>(m) + 1, ComplexField(g));
  const cplx I(0.0, 1.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const cplx e = std::exp(I * phase[0][j]);
    d[0][j] = e;
    if (m >= 1) d[1][j] = I * phase[1][j] * e;
    if (m >= 2) d[2][j] = (I * phase[2][j] - phase[1][j] * phase[1][j]) * e;
  }
  return ComplexJet(std::move(d));
}

}  // namespace nlslab
