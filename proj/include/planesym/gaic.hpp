#pragma once

#include <cstddef>

#include "planesym/lattice_fourier.hpp"

namespace planesym {

// Sum over the union of indices of |F_t - F_m|^2 (resp. (|F_t| - |F_m|)^2),
// with missing coefficients taken as zero and both sets on the common
// 1/10000 scale.
double residual_complex(const CoefficientSet& trans, const CoefficientSet& model);
double residual_amplitude(const CoefficientSet& trans, const CoefficientSet& model);

// eps^2 = J / (N - N/k); needs k >= 2 and N > N/k.
double noise_estimate(double j_best, double n_best, int k_best);

// J + 2 (N/k) eps^2
double gaic_value(double j, double n, int k, double eps2);

// Geometric G-AIC test for ascending from the less symmetric model l to the
// more symmetric model m.
double ascent_rhs(int k_m, int k_l, double n_m, double n_l);
struct AscentDecision {
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;
};
AscentDecision ascent_test(double j_m, double j_l, int k_m, int k_l, double n_m, double n_l);

// Confidence in the more symmetric model: 1 at J_m/J_l = 1 and 0 where the
// ratio reaches ascent_rhs. Built from K^2 = G-AIC_m / G-AIC_l.
double confidence_level(double ratio, int k_m, int k_l, double n_m, double n_l);

}  // namespace planesym
