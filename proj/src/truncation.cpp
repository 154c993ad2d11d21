#include "qes/truncation.hpp"

#include <cmath>
#include <stdexcept>

namespace qes {

Eigen::MatrixXd truncation_matrix(int n, double s, double b) {
  detail::require_level(n, s);
  // a c_k = -b(2k+2s+1)/2 c_k + (k+1)(k+2s+1) c_{k+1} + 2(n-k+1) c_{k-1}, k = 0..n, c_{n+1} = 0.
  const Eigen::Index dim = n + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double kk = static_cast<double>(k);
    t(k, k) = -0.5 * b * (2.0 * kk + 2.0 * s + 1.0);
    if (k + 1 < dim) t(k, k + 1) = (kk + 1.0) * (kk + 2.0 * s + 1.0);
    if (k > 0) t(k, k - 1) = 2.0 * (n - kk + 1.0);
  }
  return t;
}

QuadraticRoots heun_quadratic_roots(double b, double d) {
  if (b == 0.0) throw std::invalid_argument("heun_quadratic_roots: b must be nonzero");
  const double b2 = b * b;
  const double disc = b2 * b2 - 8.0 * b2 - 8.0 * b * d + 16.0;
  const double base = 4.0 - 2.0 * b2 - b * d;
  const std::complex<double> root = std::sqrt(std::complex<double>(disc, 0.0));
  return {(base + root) / b2, (base - root) / b2, disc};
}

RealPolynomial heun_cubic(double b, double d) {
  const double b2 = b * b, b3 = b2 * b, d2 = d * d;
  return RealPolynomial({15.0 * b3 + 23.0 * b2 * d + b * (9.0 * d2 - 112.0) + d * (d2 - 48.0),
                         23.0 * b3 + 18.0 * b2 * d + 3.0 * b * (d2 - 48.0) - 32.0 * d,
                         b * (9.0 * b2 + 3.0 * b * d - 32.0),
                         b3});
}

RealPolynomial heun_truncation_polynomial(int n0, double b, double d) {
  if (n0 < 0) throw std::invalid_argument("heun_truncation_polynomial: n0 must be >= 0");
  // With c = 2(n0+1) + a the recurrence reads
  //   2(j+2)(j+2+a) c_{j+2} = (b a + 2b(j+1) + b + d) c_{j+1} + 4(j - n0) c_j.
  // p_k = c_k prod_{m=-1}^{k-2} 2(m+2)(m+2+a) obeys
  //   p_{j+2} = (b a + 2b(j+1) + b + d) p_{j+1} + 4(j - n0) 2(j+1)(j+1+a) p_j.
  RealPolynomial prev;
  RealPolynomial cur = RealPolynomial::constant(1.0);
  for (int j = -1; j <= n0 - 1; ++j) {
    const RealPolynomial numer = RealPolynomial::linear(b, 2.0 * b * (j + 1.0) + b + d);
    const RealPolynomial denom_prev = RealPolynomial::linear(2.0 * (j + 1.0), 2.0 * (j + 1.0) * (j + 1.0));
    RealPolynomial next = numer * cur + (4.0 * (j - n0)) * denom_prev * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<double> heun_truncation_general(int n0, double b, double d, const RootOptions& opts) {
  return expand(real_roots(heun_truncation_polynomial(n0, b, d), opts));
}

}  // namespace qes
