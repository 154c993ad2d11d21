#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qes {

/// Dense univariate polynomial, coefficients in ascending degree.
template <typename Scalar>
class Polynomial {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Polynomial() : coeffs_(Coefficients::Zero(1)) {}
  explicit Polynomial(Coefficients c) : coeffs_(std::move(c)) {
    if (coeffs_.size() == 0) coeffs_ = Coefficients::Zero(1);
    trim();
  }
  Polynomial(std::initializer_list<Scalar> c) : coeffs_(static_cast<Eigen::Index>(c.size())) {
    std::copy(c.begin(), c.end(), coeffs_.data());
    if (coeffs_.size() == 0) coeffs_ = Coefficients::Zero(1);
    trim();
  }

  static Polynomial constant(Scalar v) { return Polynomial({v}); }
  /// alpha * x + beta
  static Polynomial linear(Scalar alpha, Scalar beta) { return Polynomial({beta, alpha}); }

  [[nodiscard]] const Coefficients& coefficients() const { return coeffs_; }
  [[nodiscard]] Eigen::Index degree() const { return coeffs_.size() - 1; }
  [[nodiscard]] bool is_zero() const { return coeffs_.size() == 1 && coeffs_(0) == Scalar(0); }
  [[nodiscard]] Scalar leading() const { return coeffs_(coeffs_.size() - 1); }
  Scalar operator[](Eigen::Index k) const { return k < coeffs_.size() ? coeffs_(k) : Scalar(0); }

  template <typename T>
  T operator()(const T& x) const {
    T acc = T(coeffs_(coeffs_.size() - 1));
    for (Eigen::Index k = coeffs_.size() - 2; k >= 0; --k) acc = acc * x + T(coeffs_(k));
    return acc;
  }

  [[nodiscard]] Polynomial derivative() const {
    if (degree() == 0) return Polynomial();
    Coefficients d(degree());
    for (Eigen::Index k = 1; k < coeffs_.size(); ++k) d(k - 1) = Scalar(k) * coeffs_(k);
    return Polynomial(std::move(d));
  }

  /// Divides through by the leading coefficient.
  [[nodiscard]] Polynomial monic() const {
    if (is_zero()) throw std::domain_error("Polynomial::monic: zero polynomial");
    return Polynomial(Coefficients(coeffs_ / leading()));
  }

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q) {
    Coefficients r = Coefficients::Zero(std::max(p.coeffs_.size(), q.coeffs_.size()));
    r.head(p.coeffs_.size()) += p.coeffs_;
    r.head(q.coeffs_.size()) += q.coeffs_;
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q) { return p + Scalar(-1) * q; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    Coefficients r = Coefficients::Zero(p.coeffs_.size() + q.coeffs_.size() - 1);
    for (Eigen::Index i = 0; i < p.coeffs_.size(); ++i)
      for (Eigen::Index j = 0; j < q.coeffs_.size(); ++j) r(i + j) += p.coeffs_(i) * q.coeffs_(j);
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(Scalar k, const Polynomial& p) { return Polynomial(Coefficients(k * p.coeffs_)); }
  friend Polynomial operator*(const Polynomial& p, Scalar k) { return k * p; }

 private:
  void trim() {
    Eigen::Index n = coeffs_.size();
    while (n > 1 && coeffs_(n - 1) == Scalar(0)) --n;
    if (n != coeffs_.size()) coeffs_.conservativeResize(n);
  }

  Coefficients coeffs_;
};

using RealPolynomial = Polynomial<double>;

/// A real root together with the number of companion eigenvalues merged into it.
template <typename Scalar = double>
struct RealRoot {
  Scalar value = Scalar(0);
  int multiplicity = 1;
};

struct RootOptions {
  /// |Im z| <= im_tol * scale counts as real; scale = max(1, max |root|).
  double im_tol = 1e-9;
  /// Eigenvalues closer than merge_tol * scale are one multiple root.
  double merge_tol = 1e-8;
  /// Newton refinement steps applied to simple real roots.
  int polish_steps = 3;
};

/// All complex roots via the eigenvalues of the companion matrix of the
/// monic polynomial. Throws std::domain_error for the zero polynomial.
template <typename Scalar>
std::vector<std::complex<Scalar>> companion_roots(const Polynomial<Scalar>& p) {
  using std::abs;
  using std::pow;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (p.is_zero()) throw std::domain_error("companion_roots: polynomial is identically zero");
  const Eigen::Index n = p.degree();
  if (n == 0) return {};

  const typename Polynomial<Scalar>::Coefficients monic = p.coefficients() / p.leading();
  // Fujiwara bound on root moduli; rescaling x = sigma y balances the companion matrix.
  Scalar sigma(0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar e = Scalar(1) / Scalar(n - k);
    sigma = std::max(sigma, Scalar(pow(abs(monic(k)) / Scalar(k == 0 ? 2 : 1), e)));
  }
  sigma = sigma > Scalar(0) ? Scalar(2) * sigma : Scalar(1);

  Matrix companion = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) companion(k, k - 1) = Scalar(1);
  for (Eigen::Index k = 0; k < n; ++k) companion(k, n - 1) = -monic(k) / Scalar(pow(sigma, Scalar(n - k)));

  Eigen::EigenSolver<Matrix> es(companion, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("companion_roots: eigenvalue iteration failed");
  std::vector<std::complex<Scalar>> roots(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) roots[static_cast<std::size_t>(k)] = sigma * es.eigenvalues()(k);
  return roots;
}

/// Real roots, descending, multiple roots merged. A nonzero constant has no
/// roots. Throws std::domain_error for the zero polynomial.
template <typename Scalar>
std::vector<RealRoot<Scalar>> real_roots(const Polynomial<Scalar>& p, const RootOptions& opts = {}) {
  using std::abs;
  const auto z = companion_roots(p);
  if (z.empty()) return {};

  Scalar scale(1);
  for (const auto& r : z) scale = std::max(scale, Scalar(abs(r)));

  // Single-linkage clustering of nearby eigenvalues.
  const std::size_t m = z.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (abs(z[i] - z[j]) <= Scalar(opts.merge_tol) * scale) parent[find(i)] = find(j);

  std::vector<std::complex<Scalar>> sum(m, {Scalar(0), Scalar(0)});
  std::vector<int> count(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    sum[find(i)] += z[i];
    ++count[find(i)];
  }

  const Polynomial<Scalar> dp = p.derivative();
  std::vector<RealRoot<Scalar>> out;
  for (std::size_t i = 0; i < m; ++i) {
    if (count[i] == 0) continue;
    const std::complex<Scalar> c = sum[i] / Scalar(count[i]);
    if (abs(c.imag()) > Scalar(opts.im_tol) * scale) continue;
    Scalar x = c.real();
    if (count[i] == 1) {
      for (int it = 0; it < opts.polish_steps; ++it) {
        const Scalar fx = p(x);
        const Scalar dfx = dp(x);
        if (fx == Scalar(0) || dfx == Scalar(0)) break;
        const Scalar next = x - fx / dfx;
        if (!(abs(p(next)) <= abs(fx))) break;
        x = next;
      }
    }
    out.push_back({x, count[i]});
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.value > r.value; });
  return out;
}

/// Flattens merged roots back into a descending list, repeating each value
/// by its multiplicity.
template <typename Scalar>
std::vector<Scalar> expand(const std::vector<RealRoot<Scalar>>& roots) {
  std::vector<Scalar> v;
  for (const auto& r : roots) v.insert(v.end(), static_cast<std::size_t>(r.multiplicity), r.value);
  return v;
}

}  // namespace qes
