#pragma once

#include <cmath>

namespace qes {

/// Raw inputs of the cylindrical model: angular number, disclination
/// parameter, mass, potential coefficients a1..a4, and the scale pair
/// (eta, kappa). Units with hbar = c = 1.
///
/// a2 (the harmonic coefficient of the scalar potential) does not enter the
/// radial coefficients; it is carried for completeness only.
struct PhysicalParams {
  int ell = 0;
  double alpha = 1.0;
  double mass = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;
  double eta = 1.0;
  double kappa = 0.0;
};

/// Coefficients of
///   psi'' + psi'/r - v_m2/r^2 psi + v_m1/r psi - v_p1 r psi - r^2 psi + w psi = 0.
struct RadialCoefficients {
  double v_m2 = 0.0;
  double v_m1 = 0.0;
  double v_p1 = 0.0;
  double w = 0.0;

  /// Throws std::domain_error if v_m2 < 0 (complex indicial exponent).
  RadialCoefficients(double v_m2_, double v_m1_, double v_p1_, double w_);
};

/// Parameters of the biconfluent Heun equation
///   H'' + ((1+a)/r - 2r - b) H' + (c - 2 - a - (b(a+1)+d)/(2r)) H = 0.
struct HeunParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  /// a > 0 is the physically acceptable branch; a == 0 (s == 0) is kept but
  /// marked degenerate.
  [[nodiscard]] bool degenerate() const { return !(a > 0.0); }
};

/// u'' + u'/x - gamma^2/x^2 u - a/x u - b x u - x^2 u + W u = 0.
/// The indicial exponent s = |gamma| is always derived, never stored.
template <typename Scalar>
struct BasicAddendumModel {
  Scalar gamma = Scalar(0);
  Scalar a = Scalar(0);
  Scalar b = Scalar(0);

  [[nodiscard]] Scalar s() const {
    using std::abs;
    return abs(gamma);
  }

  template <typename T>
  [[nodiscard]] BasicAddendumModel<T> cast() const {
    return {T(gamma), T(a), T(b)};
  }
};

using AddendumModel = BasicAddendumModel<double>;

RadialCoefficients radial_from_physical(const PhysicalParams& p);

/// s = sqrt(v_m2), the exponent of the regular solution at the origin.
double indicial_exponent(const RadialCoefficients& rc);

/// a = 2 sqrt(v_m2), b = v_p1, c = w + v_p1^2/4, d = -2 v_m1.
HeunParams heun_from_radial(const RadialCoefficients& rc);

}  // namespace qes
