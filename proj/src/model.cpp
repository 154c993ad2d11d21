#include "qes/model.hpp"

#include <cmath>
#include <stdexcept>

namespace qes {

RadialCoefficients::RadialCoefficients(double v_m2_, double v_m1_, double v_p1_, double w_)
    : v_m2(v_m2_), v_m1(v_m1_), v_p1(v_p1_), w(w_) {
  if (!(v_m2 >= 0.0)) {
    throw std::domain_error("RadialCoefficients: v_m2 < 0 gives a complex indicial exponent");
  }
}

RadialCoefficients radial_from_physical(const PhysicalParams& p) {
  if (!(p.eta > 0.0)) {
    throw std::invalid_argument("radial_from_physical: eta must be positive");
  }
  if (p.alpha == 0.0) {
    throw std::invalid_argument("radial_from_physical: alpha must be nonzero");
  }
  const double ell = p.ell;
  const double sqrt_eta = std::sqrt(p.eta);
  return RadialCoefficients(ell * ell / (p.alpha * p.alpha) + 2.0 * p.mass * p.a4,
                            2.0 * p.mass * p.a3 / sqrt_eta,
                            2.0 * p.mass * p.a1 / (p.eta * sqrt_eta),
                            p.kappa * p.kappa / p.eta);
}

double indicial_exponent(const RadialCoefficients& rc) {
  // Re-checked: the fields are public and may have been modified after construction.
  if (!(rc.v_m2 >= 0.0)) {
    throw std::domain_error("indicial_exponent: v_m2 < 0 gives a complex exponent");
  }
  return std::sqrt(rc.v_m2);
}

HeunParams heun_from_radial(const RadialCoefficients& rc) {
  const double s = indicial_exponent(rc);
  return HeunParams{2.0 * s, rc.v_p1, rc.w + 0.25 * rc.v_p1 * rc.v_p1, -2.0 * rc.v_m1};
}

}  // namespace qes
