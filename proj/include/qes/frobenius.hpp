#pragma once

// Frobenius-series machinery for the regular (p = 0) branch: both three-term
// recurrences, series/wavefunction evaluation and the ODE residual oracle.
// The addendum-form pieces are templated on the scalar type so that the same
// code runs in double and in extended precision.

#include "qes/model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace qes {

/// Power-series coefficients c_0..c_J of the regular Frobenius branch,
/// normalized so that c_0 = 1 (c_{-1} = 0 implicitly).
template <typename Scalar>
class Series {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Throws std::invalid_argument unless values(0) == 1 and all entries are finite.
  explicit Series(Vector values) : values_(std::move(values)) {
    if (values_.size() == 0 || values_(0) != Scalar(1)) {
      throw std::invalid_argument("Series: c_0 must equal 1");
    }
    for (Eigen::Index k = 0; k < values_.size(); ++k) {
      using std::isfinite;
      if (!isfinite(values_(k))) throw std::invalid_argument("Series: non-finite coefficient");
    }
  }

  [[nodiscard]] const Vector& values() const { return values_; }
  [[nodiscard]] Eigen::Index size() const { return values_.size(); }
  Scalar operator[](Eigen::Index j) const { return values_(j); }
  [[nodiscard]] Scalar max_abs() const { return values_.cwiseAbs().maxCoeff(); }

  /// First n+1 coefficients (the polynomial part after truncation at degree n).
  [[nodiscard]] Series head(Eigen::Index n_plus_1) const {
    return Series(Vector(values_.head(std::min(n_plus_1, values_.size()))));
  }

  template <typename T>
  [[nodiscard]] Series<T> cast() const {
    return Series<T>(values_.template cast<T>());
  }

 private:
  Vector values_;
};

using SeriesCoefficients = Series<double>;

/// Multipliers of c_{j+2} = a_j c_{j+1} + b_j c_j.
template <typename Scalar>
struct BasicRecurrencePair {
  Scalar a_j = Scalar(0);
  Scalar b_j = Scalar(0);
};

using RecurrencePair = BasicRecurrencePair<double>;

/// Value with first and second derivative.
template <typename Scalar>
struct BasicJet {
  Scalar value = Scalar(0);
  Scalar d1 = Scalar(0);
  Scalar d2 = Scalar(0);
};

using Jet = BasicJet<double>;

/// Recurrence of the Heun series H(r) = sum c_j r^j, with |a+1| = a+1.
/// Requires a > -1 and j >= -1.
RecurrencePair heun_recurrence(const HeunParams& hp, int j);

/// Recurrence of P(x) in u = x^s exp(-b x/2 - x^2/2) P(x) at energy w:
///   a_j = [2a + b(2j+2s+3)] / [2(j+2)(j+2(s+1))]
///   b_j = [4(2j+2s-W+2) - b^2] / [4(j+2)(j+2(s+1))]
template <typename Scalar>
BasicRecurrencePair<Scalar> addendum_recurrence(const BasicAddendumModel<Scalar>& m, std::type_identity_t<Scalar> w,
                                                int j) {
  if (j < -1) throw std::invalid_argument("addendum_recurrence: j must be >= -1");
  const Scalar s = m.s();
  const Scalar jj(j);
  const Scalar den = (jj + Scalar(2)) * (jj + Scalar(2) * (s + Scalar(1)));
  return {(Scalar(2) * m.a + m.b * (Scalar(2) * jj + Scalar(2) * s + Scalar(3))) / (Scalar(2) * den),
          (Scalar(4) * (Scalar(2) * jj + Scalar(2) * s - w + Scalar(2)) - m.b * m.b) / (Scalar(4) * den)};
}

/// Runs c_{j+2} = a_j c_{j+1} + b_j c_j for j = -1..J-2 from c_{-1} = 0, c_0 = 1.
template <typename Recurrence>
  requires std::invocable<Recurrence, int>
auto build_series(Recurrence&& rec, int J) {
  using Scalar = decltype(rec(0).a_j);
  if (J < 0) throw std::invalid_argument("build_series: J must be >= 0");
  typename Series<Scalar>::Vector c = Series<Scalar>::Vector::Zero(J + 1);
  c(0) = Scalar(1);
  Scalar prev(0);  // c_j, starting at c_{-1}
  for (int j = -1; j <= J - 2; ++j) {
    const auto r = rec(j);
    const Scalar cur = c(j + 1);
    c(j + 2) = r.a_j * cur + r.b_j * prev;
    prev = cur;
  }
  return Series<Scalar>(std::move(c));
}

/// P(x), P'(x), P''(x) for P(x) = sum_j c_j x^j.
template <typename Scalar>
BasicJet<Scalar> series_jet(const Series<Scalar>& coeffs, std::type_identity_t<Scalar> x) {
  const auto& c = coeffs.values();
  BasicJet<Scalar> p;
  for (Eigen::Index k = c.size() - 1; k >= 0; --k) {
    p.d2 = p.d2 * x + Scalar(2) * p.d1;
    p.d1 = p.d1 * x + p.value;
    p.value = p.value * x + c(k);
  }
  return p;
}

/// u(x) = x^s exp(-b x/2 - x^2/2) P(x) together with its analytic derivatives.
template <typename Scalar>
class AnsatzWavefunction {
 public:
  AnsatzWavefunction(const BasicAddendumModel<Scalar>& m, Series<Scalar> coeffs)
      : s_(m.s()), b_(m.b), coeffs_(std::move(coeffs)) {}

  [[nodiscard]] BasicJet<Scalar> jet(Scalar x) const {
    using std::exp;
    using std::pow;
    const Scalar f = pow(x, s_) * exp(-b_ * x / Scalar(2) - x * x / Scalar(2));
    // f'/f = s/x + g', f''/f = (s/x + g')^2 - s/x^2 + g'' with g = -b x/2 - x^2/2.
    const Scalar log_d = s_ / x - b_ / Scalar(2) - x;
    const Scalar f1 = f * log_d;
    const Scalar f2 = f * (log_d * log_d - s_ / (x * x) - Scalar(1));
    const BasicJet<Scalar> p = series_jet(coeffs_, x);
    return {f * p.value, f1 * p.value + f * p.d1, f2 * p.value + Scalar(2) * f1 * p.d1 + f * p.d2};
  }
  Scalar operator()(Scalar x) const { return jet(x).value; }
  [[nodiscard]] const Series<Scalar>& coefficients() const { return coeffs_; }

 private:
  Scalar s_;
  Scalar b_;
  Series<Scalar> coeffs_;
};

template <typename Scalar>
AnsatzWavefunction(const BasicAddendumModel<Scalar>&, Series<Scalar>) -> AnsatzWavefunction<Scalar>;

template <typename Scalar>
Scalar eval_wavefunction(const BasicAddendumModel<Scalar>& m, const Series<Scalar>& coeffs,
                         std::type_identity_t<Scalar> x) {
  if (!(x > Scalar(0))) throw std::invalid_argument("eval_wavefunction: x must be positive");
  return AnsatzWavefunction<Scalar>(m, coeffs).jet(x).value;
}

/// |u'' + u'/x - gamma^2 u/x^2 - a u/x - b x u - x^2 u + W u| from a jet at x.
template <typename Scalar>
Scalar ode_residual(const BasicAddendumModel<Scalar>& m, std::type_identity_t<Scalar> w, const BasicJet<Scalar>& u,
                    std::type_identity_t<Scalar> x) {
  using std::abs;
  if (!(x > Scalar(0))) throw std::invalid_argument("ode_residual: x must be positive");
  const Scalar potential = m.gamma * m.gamma / (x * x) + m.a / x + m.b * x + x * x - w;
  return abs(u.d2 + u.d1 / x - potential * u.value);
}

template <typename F, typename Scalar>
concept HasJet = requires(const F& f, Scalar x) {
  { f.jet(x) } -> std::convertible_to<BasicJet<Scalar>>;
};

/// Fourth-order central differences of u at x with step h.
template <typename Scalar, typename F>
  requires std::invocable<const F&, Scalar>
BasicJet<Scalar> finite_difference_jet(const F& u, Scalar x, Scalar h = Scalar(1e-4)) {
  const Scalar f0 = u(x);
  const Scalar fp1 = u(x + h), fm1 = u(x - h);
  const Scalar fp2 = u(x + Scalar(2) * h), fm2 = u(x - Scalar(2) * h);
  return {f0, (-fp2 + Scalar(8) * fp1 - Scalar(8) * fm1 + fm2) / (Scalar(12) * h),
          (-fp2 + Scalar(16) * fp1 - Scalar(30) * f0 + Scalar(16) * fm1 - fm2) / (Scalar(12) * h * h)};
}

/// Residual of the model equation for u at x > 0. Uses analytic derivatives
/// when u exposes jet(x), fourth-order finite differences (h = 1e-4) otherwise.
template <typename Scalar, typename F>
  requires(!std::same_as<std::remove_cvref_t<F>, BasicJet<Scalar>>)
Scalar ode_residual(const BasicAddendumModel<Scalar>& m, std::type_identity_t<Scalar> w, const F& u,
                    std::type_identity_t<Scalar> x) {
  if (!(x > Scalar(0))) throw std::invalid_argument("ode_residual: x must be positive");
  if constexpr (HasJet<F, Scalar>) {
    return ode_residual(m, w, BasicJet<Scalar>(u.jet(x)), x);
  } else {
    return ode_residual(m, w, finite_difference_jet<Scalar>(u, x), x);
  }
}

/// Residual of the biconfluent Heun equation for H = sum c_j r^j at r > 0.
double heun_ode_residual(const HeunParams& hp, const SeriesCoefficients& coeffs, double r);

}  // namespace qes
