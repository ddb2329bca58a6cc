#pragma once
// Black soliton u0 = tanh(x/sqrt2), its derivatives in closed form, and the
// travelling dark-soliton family in the rotating frame.

#include "nlslab/grid.hpp"
#include "nlslab/jet.hpp"

namespace nlslab {

inline constexpr double kSqrt2 = 1.41421356237309504880;
/// ||u0'||^2 = 2 sqrt2 / 3
inline constexpr double kU0pNorm2 = 2.0 * kSqrt2 / 3.0;

/// k-th derivative (k <= 6) of a*tanh(kappa*x), exact up to rounding also in
/// the tails (derivatives carry sech^2 evaluated from cosh, not 1 - tanh^2).
double tanh_derivative(double x, int k, double a = 1.0, double kappa = 1.0 / kSqrt2);

/// k-th derivative of u0 evaluated at x.
inline double u0_derivative(double x, int k) { return tanh_derivative(x, k); }

struct SolitonBundle {
  Grid grid;
  RealField u0, u0p, u0pp, u0ppp, u0pppp;

  /// u0 with derivatives up to `order` (<= 4).
  RealJet jet(int order = 4) const;
};

SolitonBundle black_soliton(const Grid& g);

/// Samples of u0^(k)(x - shift).
RealField sample_u0(const Grid& g, int k, double shift = 0.0);
/// u0(. - shift) as a jet up to `order` (<= 6).
RealJet u0_jet(const Grid& g, int order, double shift = 0.0);

/// sqrt(1 - nu^2/2) tanh(sqrt(1/2 - nu^2/4) x) + i nu/sqrt2. Throws
/// SpeedOutOfRange for |nu| >= sqrt2.
ComplexField dark_soliton(const Grid& g, double nu);
ComplexJet dark_soliton_jet(const Grid& g, double nu, int order, double shift = 0.0);

/// max_j | phi'' + (1 - |phi|^2) phi - i nu phi' | with derivatives by finite
/// differences. Zero (to FD accuracy) for the profile travelling at speed nu.
double travelling_residual(const ComplexField& phi, double nu);

}  // namespace nlslab
