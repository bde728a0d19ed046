#include "planesym/gaic.hpp"

#include <set>
#include <stdexcept>

namespace planesym {

namespace {

template <class Term>
double residual(const CoefficientSet& a, const CoefficientSet& b, Term term) {
  std::set<Miller> idx;
  for (const auto& [m, c] : a.values)
    idx.insert(m);
  for (const auto& [m, c] : b.values)
    idx.insert(m);
  double s = 0;
  for (Miller m : idx)
    s += term(a.value(m) / CoefficientSet::kMaxAmplitude, b.value(m) / CoefficientSet::kMaxAmplitude);
  return s;
}

}  // namespace

double residual_complex(const CoefficientSet& trans, const CoefficientSet& model) {
  return residual(trans, model, [](Complex x, Complex y) { return std::norm(x - y); });
}

double residual_amplitude(const CoefficientSet& trans, const CoefficientSet& model) {
  return residual(trans, model, [](Complex x, Complex y) {
    double d = std::abs(x) - std::abs(y);
    return d * d;
  });
}

double noise_estimate(double j_best, double n_best, int k_best) {
  if (k_best < 2)
    throw std::domain_error("noise estimate needs k >= 2");
  double dof = n_best - n_best / k_best;
  if (!(dof > 0))
    throw std::domain_error("noise estimate needs N > N/k");
  if (j_best < 0)
    throw std::domain_error("residual must be non-negative");
  return j_best / dof;
}

double gaic_value(double j, double n, int k, double eps2) {
  if (k < 1)
    throw std::domain_error("k must be positive");
  return j + 2 * (n / k) * eps2;
}

double ascent_rhs(int k_m, int k_l, double n_m, double n_l) {
  if (k_l < 2)
    throw std::domain_error("ascent test needs k_l >= 2");
  if (k_m <= k_l)
    throw std::domain_error("ascent test needs k_m > k_l");
  if (!(n_m > 0) || !(n_l > 0))
    throw std::domain_error("ascent test needs positive coefficient counts");
  return 1.0 + 2.0 * (k_m - (n_m / n_l) * k_l) / (double(k_m) * (k_l - 1));
}

AscentDecision ascent_test(double j_m, double j_l, int k_m, int k_l, double n_m, double n_l) {
  if (!(j_l > 0))
    throw std::domain_error("ascent test needs J_l > 0");
  if (j_m < 0)
    throw std::domain_error("residual must be non-negative");
  AscentDecision d;
  d.rhs = ascent_rhs(k_m, k_l, n_m, n_l);
  d.lhs = j_m / j_l;
  d.passed = d.lhs < d.rhs;
  return d;
}

double confidence_level(double ratio, int k_m, int k_l, double n_m, double n_l) {
  double rhs = ascent_rhs(k_m, k_l, n_m, n_l);
  if (!(rhs > 1))
    throw std::domain_error("confidence level undefined when the ascent bound is <= 1");
  if (ratio < 0)
    throw std::domain_error("residual ratio must be non-negative");
  // With eps^2 = J_l / (N_l - N_l/k_l):
  //   G-AIC_m / G-AIC_l = (ratio + 2 N_m k_l / (N_l k_m (k_l - 1))) (k_l - 1) / (k_l + 1)
  double c = 2.0 * n_m * k_l / (n_l * k_m * (k_l - 1));
  double f = double(k_l - 1) / (k_l + 1);
  double K = std::sqrt((ratio + c) * f);
  double Kc = std::sqrt((1 + c) * f);
  return (1 - K) / (1 - Kc);
}

}  // namespace planesym
