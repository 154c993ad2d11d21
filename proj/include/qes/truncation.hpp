#pragma once

#include "qes/errors.hpp"
#include "qes/frobenius.hpp"
#include "qes/model.hpp"
#include "qes/polynomial.hpp"

#include <algorithm>
#include <complex>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace qes {

/// One polynomial eigenpair of the conditionally solvable model. Every
/// record carries the coupling a_root it belongs to: solutions sharing w
/// belong to different potentials.
template <typename Scalar>
struct BasicTruncationSolution {
  int n = 0;  ///< degree of P
  int i = 1;  ///< 1-based root index, roots sorted descending
  Scalar a_root = Scalar(0);
  Scalar w = Scalar(0);
  Scalar s = Scalar(0);
  Scalar b = Scalar(0);
  Series<Scalar> coeffs{Series<Scalar>::Vector::Ones(1)};  ///< c_0..c_n

  [[nodiscard]] BasicAddendumModel<Scalar> model() const { return {s, a_root, b}; }
};

using TruncationSolution = BasicTruncationSolution<double>;

namespace detail {

inline void require_level(int n, double s) {
  if (n < 0) throw std::invalid_argument("truncation: n must be >= 0");
  if (!(s >= 0.0)) throw std::invalid_argument("truncation: s must be >= 0");
}

}  // namespace detail

/// W_s^(n) = 2(n + s + 1) - b^2/4
template <typename Scalar = double>
Scalar truncation_energy(int n, std::type_identity_t<Scalar> s, std::type_identity_t<Scalar> b) {
  detail::require_level(n, static_cast<double>(s));
  return Scalar(2) * (Scalar(n) + s + Scalar(1)) - b * b / Scalar(4);
}

/// Series of the addendum recurrence at (a, W_s^(n)) up to c_J.
template <typename Scalar = double>
Series<Scalar> truncation_series(int n, std::type_identity_t<Scalar> s, std::type_identity_t<Scalar> b,
                                 std::type_identity_t<Scalar> a, int J) {
  const BasicAddendumModel<Scalar> m{s, a, b};
  const Scalar w = truncation_energy<Scalar>(n, s, b);
  return build_series([&](int j) { return addendum_recurrence(m, w, j); }, J);
}

/// c_{n+1} as a polynomial in a (degree n+1), with W = truncation_energy(n, s, b),
/// built by running the recurrence on coefficient arrays in a.
template <typename Scalar = double>
Polynomial<Scalar> truncation_polynomial_in_a(int n, std::type_identity_t<Scalar> s, std::type_identity_t<Scalar> b) {
  const Scalar w = truncation_energy<Scalar>(n, s, b);
  const BasicAddendumModel<Scalar> at_zero{s, Scalar(0), b};
  // a_j = a / E_j + (a_j at a = 0) with E_j = (j+2)(j+2(s+1)); b_j does not depend on a.
  Polynomial<Scalar> prev;  // c_{-1}
  Polynomial<Scalar> cur = Polynomial<Scalar>::constant(Scalar(1));
  for (int j = -1; j <= n - 1; ++j) {
    const auto r = addendum_recurrence(at_zero, w, j);
    const Scalar e = Scalar(j + 2) * (Scalar(j) + Scalar(2) * (s + Scalar(1)));
    Polynomial<Scalar> next = Polynomial<Scalar>::linear(Scalar(1) / e, r.a_j) * cur + r.b_j * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// The same roots as eigenvalues of the (n+1)x(n+1) tridiagonal matrix
/// obtained by writing the truncated recurrence as a linear problem in a.
Eigen::MatrixXd truncation_matrix(int n, double s, double b);

/// max(|c_{n+1}|, |c_{n+2}|) / max_j |c_j| for the series rebuilt at (a, W_s^(n)).
template <typename Scalar = double>
Scalar closure_defect(int n, std::type_identity_t<Scalar> s, std::type_identity_t<Scalar> b,
                      std::type_identity_t<Scalar> a) {
  using std::abs;
  const Series<Scalar> c = truncation_series<Scalar>(n, s, b, a, n + 2);
  return std::max(abs(c[n + 1]), abs(c[n + 2])) / c.max_abs();
}

/// Builds the polynomial solution for a verified root. Throws NumericalError
/// if c_{n+1} or c_{n+2} do not vanish to 1e-12 max|c_j|.
template <typename Scalar = double>
BasicTruncationSolution<Scalar> assemble_solution(int n, std::type_identity_t<Scalar> s,
                                                  std::type_identity_t<Scalar> b, std::type_identity_t<Scalar> a_root,
                                                  int i = 1) {
  using std::abs;
  const Series<Scalar> full = truncation_series<Scalar>(n, s, b, a_root, n + 2);
  const Scalar tail = std::max(abs(full[n + 1]), abs(full[n + 2]));
  if (!(tail <= Scalar(1e-12) * full.max_abs())) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "assemble_solution: a = " << static_cast<double>(a_root) << " is not a truncation root (n = " << n << ")";
    throw NumericalError(msg.str());
  }
  return BasicTruncationSolution<Scalar>{n, i, a_root, truncation_energy<Scalar>(n, s, b), s, b, full.head(n + 1)};
}

/// All n+1 solutions of level n, i = 1..n+1 in descending a. Throws
/// NumericalError if fewer than n+1 real roots are found.
template <typename Scalar = double>
std::vector<BasicTruncationSolution<Scalar>> truncation_family(int n, std::type_identity_t<Scalar> s,
                                                               std::type_identity_t<Scalar> b,
                                                               const RootOptions& opts = {}) {
  const std::vector<Scalar> roots = expand(real_roots(truncation_polynomial_in_a<Scalar>(n, s, b), opts));
  if (static_cast<int>(roots.size()) != n + 1) {
    throw NumericalError("truncation_family: found " + std::to_string(roots.size()) + " real roots, expected " +
                         std::to_string(n + 1));
  }
  std::vector<BasicTruncationSolution<Scalar>> family;
  family.reserve(roots.size());
  for (std::size_t k = 0; k < roots.size(); ++k) {
    family.push_back(assemble_solution<Scalar>(n, s, b, roots[k], static_cast<int>(k) + 1));
  }
  return family;
}

// ---------------------------------------------------------------------------
// Heun parameterization

struct QuadraticRoots {
  std::complex<double> plus;
  std::complex<double> minus;
  double discriminant = 0.0;
  [[nodiscard]] bool complex() const { return discriminant < 0.0; }
};

/// a^{+-} = [4 - 2b^2 - bd +- sqrt(b^4 - 8b^2 - 8bd + 16)] / b^2. Throws for b == 0.
QuadraticRoots heun_quadratic_roots(double b, double d);

/// Closed-form cubic whose roots are the Heun truncation roots for n0 = 2.
RealPolynomial heun_cubic(double b, double d);

/// Numerator of c_{n0+1} after substituting c = 2(n0+1) + a into the Heun
/// recurrence and clearing the a-dependent denominators; degree n0+1 in a.
RealPolynomial heun_truncation_polynomial(int n0, double b, double d);

/// Real roots of heun_truncation_polynomial, descending (with multiplicity).
/// For b == 0 the degree drops below n0 + 1 and fewer roots are returned.
std::vector<double> heun_truncation_general(int n0, double b, double d, const RootOptions& opts = {});

}  // namespace qes
