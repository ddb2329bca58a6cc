#pragma once
// Seeded test fields with closed-form derivatives: sums of Gaussian bumps and
// slow phase ramps on the soliton.

#include <cstdint>
#include <random>
#include <vector>

#include "nlslab/jet.hpp"

namespace nlslab {

struct Bump {
  double center = 0.0;
  double width = 1.0;
  double amplitude = 1.0;
};

/// Uniform double in [a, b) from the top 53 bits; fixed across standard libraries.
double uniform(std::mt19937_64& rng, double a, double b);

/// a * exp(-((x - c)/w)^2) with derivatives up to `order` (<= 4).
RealJet gaussian_jet(const Grid& g, const Bump& b, int order);

struct BumpSum {
  std::vector<Bump> bumps;
  RealJet jet(const Grid& g, int order) const;
};

/// 3..8 bumps, centers in [-L/2, L/2], widths in [0.5, min(5, L/8)], amplitudes in [-1, 1].
BumpSum random_bumps(std::mt19937_64& rng, double half_width);

/// f - (<c, f> / <c, c>) c, applied to every derivative.
RealJet project_out(const RealJet& f, const RealJet& c);

/// Scale so that the jet value has unit L2 norm.
RealJet normalized(const RealJet& f);

/// u0 exp(i a tanh(x/s)) - u0, split into real and imaginary parts (order <= 2).
struct PhaseRamp {
  double amplitude = 0.01;
  double scale = 20.0;
  RealJet phase(const Grid& g, int order) const;
  ComplexJet psi(const Grid& g) const;
};

}  // namespace nlslab
