#include "qes/frobenius.hpp"

#include <cmath>
#include <stdexcept>

namespace qes {

RecurrencePair heun_recurrence(const HeunParams& hp, int j) {
  if (j < -1) throw std::invalid_argument("heun_recurrence: j must be >= -1");
  if (!(hp.a > -1.0)) throw std::domain_error("heun_recurrence: requires a > -1");
  const double jj = j;
  const double den = (jj + 2.0) * (jj + 2.0 + hp.a);
  if (den == 0.0) throw std::domain_error("heun_recurrence: vanishing denominator");
  return {(2.0 * hp.b * (jj + 1.0) + hp.b * (hp.a + 1.0) + hp.d) / (2.0 * den),
          (hp.a - hp.c + 2.0 * jj + 2.0) / den};
}

double heun_ode_residual(const HeunParams& hp, const SeriesCoefficients& coeffs, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("heun_ode_residual: r must be positive");
  const Jet h = series_jet(coeffs, r);
  const double first = (1.0 + hp.a) / r - 2.0 * r - hp.b;
  const double zeroth = hp.c - 2.0 - hp.a - (hp.b * (hp.a + 1.0) + hp.d) / (2.0 * r);
  return std::abs(h.d2 + first * h.d1 + zeroth * h.value);
}

}  // namespace qes
