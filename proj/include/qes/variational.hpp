#pragma once

// Rayleigh-Ritz solver over the non-orthogonal basis
//   phi_j(x) = x^{s+j} exp(-x^2/2),  j = 0..N-1,
// with inner product weight x dx on (0, inf). Every matrix element reduces to
//   I(m) = int_0^inf x^m exp(-x^2) dx = Gamma((m+1)/2) / 2.
//
// Templated on the scalar type; double is the default.

#include "qes/errors.hpp"
#include "qes/model.hpp"
#include "qes/truncation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qes {

template <typename Scalar>
using DenseSymMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
struct BasisSpec {
  Eigen::Index size = 25;
  Scalar s = Scalar(0);
  bool normalize = true;

  void validate() const {
    if (size < 1) throw std::invalid_argument("BasisSpec: size must be >= 1");
    if (!(s >= Scalar(0))) throw std::invalid_argument("BasisSpec: s must be >= 0");
  }
};

inline constexpr double kDefaultDropTol = 1e-12;

/// Solution of H c = W S c in the retained subspace.
template <typename Scalar = double>
struct EigenSolution {
  DenseVector<Scalar> eigenvalues;  ///< ascending
  DenseSymMatrix<Scalar> vectors;   ///< columns, c^T S c = 1
  Eigen::Index effective_dimension = 0;
  Scalar overlap_max = Scalar(0);       ///< largest eigenvalue of S
  Scalar overlap_min_kept = Scalar(0);  ///< smallest retained eigenvalue of S
  Scalar overlap_min = Scalar(0);       ///< smallest eigenvalue of S overall

  [[nodiscard]] Scalar retained_condition() const { return overlap_max / overlap_min_kept; }
};

template <typename Scalar>
Scalar gaussian_moment(Scalar m) {
  if (!(m > Scalar(-1))) throw std::domain_error("gaussian_moment: divergent for m <= -1");
  using std::tgamma;
  return Scalar(0.5) * tgamma((m + Scalar(1)) / Scalar(2));
}

/// Diagonal scaling giving the basis unit overlap (all ones if !normalize).
template <typename Scalar>
DenseVector<Scalar> basis_scaling(const BasisSpec<Scalar>& bs) {
  bs.validate();
  DenseVector<Scalar> d = DenseVector<Scalar>::Ones(bs.size);
  if (bs.normalize) {
    using std::sqrt;
    for (Eigen::Index i = 0; i < bs.size; ++i) {
      d(i) = Scalar(1) / sqrt(gaussian_moment(Scalar(2) * bs.s + Scalar(2 * i + 1)));
    }
  }
  return d;
}

/// M_ij = <phi_i| x^power |phi_j> in the (scaled) basis.
template <typename Scalar>
DenseSymMatrix<Scalar> moment_matrix(const BasisSpec<Scalar>& bs, int power) {
  const DenseVector<Scalar> d = basis_scaling(bs);
  DenseSymMatrix<Scalar> m(bs.size, bs.size);
  for (Eigen::Index j = 0; j < bs.size; ++j) {
    for (Eigen::Index i = j; i < bs.size; ++i) {
      m(i, j) = d(i) * d(j) * gaussian_moment(Scalar(2) * bs.s + Scalar(i + j + 1 + power));
      m(j, i) = m(i, j);
    }
  }
  return m;
}

template <typename Scalar>
DenseSymMatrix<Scalar> overlap_matrix(const BasisSpec<Scalar>& bs) {
  return moment_matrix(bs, 0);
}

/// H_ij = <phi_i|H phi_j> with
///   H phi_j = [(gamma^2 - k^2) x^{k-2} + a x^{k-1} + 2(k+1) x^k + b x^{k+1}] exp(-x^2/2),  k = s + j.
/// The analytic H_ij and H_ji are averaged; terms with a zero prefactor are
/// skipped so gamma = s never requests the divergent moment at i = j = 0.
template <typename Scalar>
DenseSymMatrix<Scalar> hamiltonian_matrix(const BasisSpec<Scalar>& bs, const AddendumModel& model) {
  const DenseVector<Scalar> d = basis_scaling(bs);
  const Scalar g2 = Scalar(model.gamma) * Scalar(model.gamma);
  const Scalar a = Scalar(model.a);
  const Scalar b = Scalar(model.b);
  const Scalar two_s = Scalar(2) * bs.s;

  auto element = [&](Eigen::Index i, Eigen::Index j) {
    const Scalar k = bs.s + Scalar(j);
    const Scalar base = two_s + Scalar(i + j);
    const Scalar centrifugal = g2 - k * k;
    Scalar h = Scalar(2) * (k + Scalar(1)) * gaussian_moment(base + Scalar(1));
    if (centrifugal != Scalar(0)) h += centrifugal * gaussian_moment(base - Scalar(1));
    if (a != Scalar(0)) h += a * gaussian_moment(base);
    if (b != Scalar(0)) h += b * gaussian_moment(base + Scalar(2));
    return h;
  };

  DenseSymMatrix<Scalar> h(bs.size, bs.size);
  for (Eigen::Index j = 0; j < bs.size; ++j) {
    for (Eigen::Index i = j; i < bs.size; ++i) {
      h(i, j) = d(i) * d(j) * (element(i, j) + element(j, i)) / Scalar(2);
      h(j, i) = h(i, j);
    }
  }
  return h;
}

/// Canonical orthogonalization: eigendecompose S, drop directions with
/// eigenvalue < drop_tol * max, solve the reduced symmetric problem and map
/// the eigenvectors back. Throws NumericalError on basis collapse.
template <typename Scalar>
EigenSolution<Scalar> generalized_eigensolve(const DenseSymMatrix<Scalar>& h, const DenseSymMatrix<Scalar>& s_mat,
                                             Scalar drop_tol = Scalar(kDefaultDropTol)) {
  if (h.rows() != h.cols() || s_mat.rows() != s_mat.cols() || h.rows() != s_mat.rows()) {
    throw std::invalid_argument("generalized_eigensolve: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<DenseSymMatrix<Scalar>> overlap(s_mat);
  if (overlap.info() != Eigen::Success) throw NumericalError("generalized_eigensolve: overlap diagonalization failed");

  const DenseVector<Scalar>& lambda = overlap.eigenvalues();
  const Eigen::Index n = lambda.size();
  const Scalar lmax = lambda(n - 1);
  if (!(lmax > Scalar(0))) throw NumericalError("generalized_eigensolve: overlap has no positive eigenvalue");

  Eigen::Index first = 0;  // eigenvalues ascending: keep the tail
  while (first < n && lambda(first) < drop_tol * lmax) ++first;
  const Eigen::Index kept = n - first;
  if (kept == 0) throw NumericalError("generalized_eigensolve: basis collapse");

  using std::sqrt;
  DenseSymMatrix<Scalar> x = overlap.eigenvectors().rightCols(kept);
  for (Eigen::Index c = 0; c < kept; ++c) x.col(c) /= sqrt(lambda(first + c));

  DenseSymMatrix<Scalar> reduced = x.transpose() * h * x;
  reduced = (reduced + reduced.transpose()).eval() / Scalar(2);
  Eigen::SelfAdjointEigenSolver<DenseSymMatrix<Scalar>> es(reduced);
  if (es.info() != Eigen::Success) throw NumericalError("generalized_eigensolve: reduced problem failed");

  EigenSolution<Scalar> out;
  out.eigenvalues = es.eigenvalues();
  out.vectors = x * es.eigenvectors();
  out.effective_dimension = kept;
  out.overlap_max = lmax;
  out.overlap_min_kept = lambda(first);
  out.overlap_min = lambda(0);
  return out;
}

template <typename Scalar>
EigenSolution<Scalar> rayleigh_ritz(const AddendumModel& model, const BasisSpec<Scalar>& bs,
                                    Scalar drop_tol = Scalar(kDefaultDropTol)) {
  return generalized_eigensolve(hamiltonian_matrix(bs, model), overlap_matrix(bs), drop_tol);
}

/// <x^power> = c^T M c / c^T S c.
template <typename Scalar, typename Derived>
Scalar expectation(int power, const Eigen::MatrixBase<Derived>& c, const BasisSpec<Scalar>& bs) {
  const DenseSymMatrix<Scalar> m = moment_matrix(bs, power);
  const DenseSymMatrix<Scalar> s = overlap_matrix(bs);
  return c.dot(m * c) / c.dot(s * c);
}

template <typename Scalar = double>
struct HellmannFeynmanReport {
  int nu = 0;
  Scalar w = Scalar(0);
  Scalar slope_a_fd = Scalar(0);  ///< (W(a+delta) - W(a-delta)) / (2 delta)
  Scalar slope_a_hf = Scalar(0);  ///< <1/x>
  Scalar slope_b_fd = Scalar(0);
  Scalar slope_b_hf = Scalar(0);  ///< <x>
  Scalar abs_dev_a = Scalar(0);
  Scalar abs_dev_b = Scalar(0);
  Scalar rel_dev_a = Scalar(0);
  Scalar rel_dev_b = Scalar(0);
  bool positive = false;  ///< all four slopes > 0
  bool crossing = false;  ///< eigenvalue ordering changed inside the stencil

  [[nodiscard]] bool passes(Scalar rel_tol) const {
    return positive && !crossing && rel_dev_a <= rel_tol && rel_dev_b <= rel_tol;
  }
};

namespace detail {

/// Value of level nu at a shifted model, flagging when another level is
/// closer to the first-order prediction than level nu is.
template <typename Scalar>
Scalar shifted_level(const AddendumModel& shifted, int nu, Scalar predicted, const BasisSpec<Scalar>& bs,
                     Scalar drop_tol, bool& crossing) {
  const EigenSolution<Scalar> sol = rayleigh_ritz(shifted, bs, drop_tol);
  if (nu >= sol.effective_dimension) throw NumericalError("hellmann_feynman_check: nu exceeds effective dimension");
  Eigen::Index nearest = 0;
  (sol.eigenvalues.array() - predicted).abs().minCoeff(&nearest);
  if (nearest != nu) crossing = true;
  return sol.eigenvalues(nu);
}

}  // namespace detail

/// Central differences of W_nu in a and b against <1/x> and <x>.
template <typename Scalar>
HellmannFeynmanReport<Scalar> hellmann_feynman_check(const AddendumModel& m, int nu, Scalar delta,
                                                     const BasisSpec<Scalar>& bs,
                                                     Scalar drop_tol = Scalar(kDefaultDropTol)) {
  if (!(delta > Scalar(0))) throw std::invalid_argument("hellmann_feynman_check: delta must be positive");
  const EigenSolution<Scalar> center = rayleigh_ritz(m, bs, drop_tol);
  if (nu < 0 || nu >= center.effective_dimension) {
    throw std::invalid_argument("hellmann_feynman_check: nu outside the effective dimension");
  }
  HellmannFeynmanReport<Scalar> r;
  r.nu = nu;
  r.w = center.eigenvalues(nu);
  r.slope_a_hf = expectation(-1, center.vectors.col(nu), bs);
  r.slope_b_hf = expectation(1, center.vectors.col(nu), bs);

  const double dd = static_cast<double>(delta);
  const auto level = [&](AddendumModel shifted, Scalar predicted) {
    return detail::shifted_level(shifted, nu, predicted, bs, drop_tol, r.crossing);
  };
  const Scalar wa_plus = level({m.gamma, m.a + dd, m.b}, r.w + delta * r.slope_a_hf);
  const Scalar wa_minus = level({m.gamma, m.a - dd, m.b}, r.w - delta * r.slope_a_hf);
  const Scalar wb_plus = level({m.gamma, m.a, m.b + dd}, r.w + delta * r.slope_b_hf);
  const Scalar wb_minus = level({m.gamma, m.a, m.b - dd}, r.w - delta * r.slope_b_hf);

  using std::abs;
  r.slope_a_fd = (wa_plus - wa_minus) / (Scalar(2) * delta);
  r.slope_b_fd = (wb_plus - wb_minus) / (Scalar(2) * delta);
  r.abs_dev_a = abs(r.slope_a_fd - r.slope_a_hf);
  r.abs_dev_b = abs(r.slope_b_fd - r.slope_b_hf);
  r.rel_dev_a = r.abs_dev_a / abs(r.slope_a_hf);
  r.rel_dev_b = r.abs_dev_b / abs(r.slope_b_hf);
  r.positive = r.slope_a_fd > Scalar(0) && r.slope_a_hf > Scalar(0) && r.slope_b_fd > Scalar(0) &&
               r.slope_b_hf > Scalar(0);
  return r;
}

/// W_nu(a) sampled on a grid at fixed (s, b).
template <typename Scalar = double>
struct SpectralCurve {
  int nu = 0;
  std::vector<Scalar> a;
  std::vector<Scalar> w;

  [[nodiscard]] bool strictly_increasing() const {
    for (std::size_t k = 1; k < w.size(); ++k)
      if (!(w[k] > w[k - 1])) return false;
    return true;
  }

  /// Index k with |slope_{k+1} - slope_k| > jump * max(|slope_k|, |slope_{k+1}|),
  /// slope_k being the secant on [a_k, a_{k+1}]; a level swap shows up this way.
  [[nodiscard]] std::optional<std::size_t> slope_jump(Scalar jump = Scalar(0.5)) const {
    using std::abs;
    for (std::size_t k = 1; k + 1 < w.size(); ++k) {
      const Scalar left = (w[k] - w[k - 1]) / (a[k] - a[k - 1]);
      const Scalar right = (w[k + 1] - w[k]) / (a[k + 1] - a[k]);
      if (abs(right - left) > jump * std::max(abs(left), abs(right))) return k;
    }
    return std::nullopt;
  }

  [[nodiscard]] bool covers(Scalar x) const { return !a.empty() && x >= a.front() && x <= a.back(); }

  /// Linear interpolation between grid samples; requires covers(x).
  [[nodiscard]] Scalar interpolate(Scalar x) const {
    if (!covers(x)) throw std::out_of_range("SpectralCurve::interpolate: outside grid");
    if (a.size() == 1) return w.front();
    auto it = std::upper_bound(a.begin(), a.end(), x);
    std::size_t hi = it == a.end() ? a.size() - 1 : static_cast<std::size_t>(it - a.begin());
    const std::size_t lo = hi - 1;
    const Scalar t = (x - a[lo]) / (a[hi] - a[lo]);
    return w[lo] + t * (w[hi] - w[lo]);
  }
};

/// a_k = a_min + k * step, k = 0..round((a_max - a_min) / step).
std::vector<double> make_grid(double a_min, double a_max, double step);

/// One Rayleigh-Ritz solve per grid value; returns curves nu = 0..nu_max.
/// Throws NumericalError naming the grid point on basis collapse or when
/// nu_max reaches the effective dimension.
template <typename Scalar>
std::vector<SpectralCurve<Scalar>> spectral_curves(Scalar s, Scalar b, const std::vector<Scalar>& a_grid, int nu_max,
                                                   BasisSpec<Scalar> bs, Scalar drop_tol = Scalar(kDefaultDropTol)) {
  if (nu_max < 0) throw std::invalid_argument("spectral_curves: nu_max must be >= 0");
  if (!std::is_sorted(a_grid.begin(), a_grid.end())) throw std::invalid_argument("spectral_curves: grid not ascending");
  bs.s = s;
  std::vector<SpectralCurve<Scalar>> curves(static_cast<std::size_t>(nu_max) + 1);
  for (int nu = 0; nu <= nu_max; ++nu) {
    curves[static_cast<std::size_t>(nu)].nu = nu;
    curves[static_cast<std::size_t>(nu)].a.reserve(a_grid.size());
    curves[static_cast<std::size_t>(nu)].w.reserve(a_grid.size());
  }
  for (const Scalar a : a_grid) {
    const AddendumModel model{static_cast<double>(s), static_cast<double>(a), static_cast<double>(b)};
    EigenSolution<Scalar> sol;
    try {
      sol = rayleigh_ritz(model, bs, drop_tol);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "spectral_curves: at grid point a = " << a << ": " << e.what();
      throw NumericalError(msg.str());
    }
    if (nu_max >= sol.effective_dimension) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "spectral_curves: at grid point a = " << a << ": nu_max " << nu_max << " >= effective dimension "
          << sol.effective_dimension;
      throw NumericalError(msg.str());
    }
    for (int nu = 0; nu <= nu_max; ++nu) {
      curves[static_cast<std::size_t>(nu)].a.push_back(a);
      curves[static_cast<std::size_t>(nu)].w.push_back(sol.eigenvalues(nu));
    }
  }
  return curves;
}

enum class MatchStatus {
  Assigned,       ///< on curve nu = i-1 within tolerance
  IndexMismatch,  ///< on some curve within tolerance, but nu != i-1
  Unmatched,      ///< no curve within tolerance
  OutOfRange,     ///< a_root outside the sampled grid
};

const char* to_string(MatchStatus s);

struct PointAssignment {
  int n = 0;
  int i = 1;
  double a_root = 0.0;
  double w = 0.0;
  int nu = -1;              ///< best curve, -1 if out of range
  double w_curve = 0.0;     ///< interpolated W_nu(a_root)
  double residual = 0.0;    ///< |W_nu(a_root) - w| / |w|
  MatchStatus status = MatchStatus::OutOfRange;
};

/// Locates, for every truncation point, the curve closest to it at a_root.
template <typename Scalar>
std::vector<PointAssignment> match_points_to_curves(const std::vector<SpectralCurve<Scalar>>& curves,
                                                    const std::vector<TruncationSolution>& points, double tol) {
  std::vector<PointAssignment> out;
  out.reserve(points.size());
  for (const TruncationSolution& p : points) {
    PointAssignment r{p.n, p.i, p.a_root, p.w};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : curves) {
      if (!c.covers(Scalar(p.a_root))) continue;
      const double wc = static_cast<double>(c.interpolate(Scalar(p.a_root)));
      const double dev = std::abs(wc - p.w);
      if (dev < best) {
        best = dev;
        r.nu = c.nu;
        r.w_curve = wc;
      }
    }
    if (r.nu >= 0) {
      r.residual = best / std::abs(p.w);
      if (!(r.residual <= tol)) {
        r.status = MatchStatus::Unmatched;
      } else {
        r.status = r.nu == p.i - 1 ? MatchStatus::Assigned : MatchStatus::IndexMismatch;
      }
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace qes
