#include "qes/errors.hpp"
#include "qes/truncation.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

using namespace qes;

TEST_CASE("truncation energies") {
  CHECK(truncation_energy(0, 0.0, 0.0) == 2.0);
  CHECK(truncation_energy(1, 0.0, 1.0) == 3.75);
  CHECK(truncation_energy(2, 1.5, 2.0) == 8.0);
  CHECK_THROWS_AS(truncation_energy(-1, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(truncation_energy(0, -0.5, 1.0), std::invalid_argument);
}

TEST_CASE("truncation polynomial examples") {
  const auto p0 = truncation_polynomial_in_a(0, 0.0, 1.0);
  REQUIRE(p0.degree() == 1);
  CHECK(p0[0] / p0[1] == doctest::Approx(0.5));  // proportional to 2a + 1

  const auto p1 = truncation_polynomial_in_a(1, 0.0, 1.0);
  REQUIRE(p1.degree() == 2);
  CHECK(p1[1] / p1[2] == doctest::Approx(2.0));    // 4a^2 + 8a - 5
  CHECK(p1[0] / p1[2] == doctest::Approx(-1.25));
  const auto r1 = expand(real_roots(p1));
  REQUIRE(r1.size() == 2);
  CHECK(r1[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r1[1] == doctest::Approx(-2.5).epsilon(1e-14));

  const auto osc = truncation_polynomial_in_a(0, 0.0, 0.0);
  CHECK(osc[0] == 0.0);
  CHECK(osc.degree() == 1);
}

TEST_CASE("polynomial roots agree with the tridiagonal eigenvalue oracle") {
  for (int n = 0; n <= 10; ++n)
    for (double s : {0.0, 0.5, 1.0, 2.0})
      for (double b : {0.5, 1.0, 2.0}) {
        const auto roots = expand(real_roots(truncation_polynomial_in_a(n, s, b)));
        Eigen::EigenSolver<Eigen::MatrixXd> es(truncation_matrix(n, s, b), false);
        std::vector<double> oracle;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
          CHECK(std::abs(es.eigenvalues()(k).imag()) < 1e-8);
          oracle.push_back(es.eigenvalues()(k).real());
        }
        std::sort(oracle.rbegin(), oracle.rend());
        REQUIRE(roots.size() == oracle.size());
        for (std::size_t k = 0; k < roots.size(); ++k)
          CHECK(std::abs(roots[k] - oracle[k]) <= 1e-8 * std::max(1.0, std::abs(oracle[k])));
      }
}

TEST_CASE("all roots are real and strictly ordered for s = 0, b = 1") {
  for (int n = 0; n <= 10; ++n) {
    const auto fam = truncation_family(n, 0.0, 1.0);
    REQUIRE(fam.size() == static_cast<std::size_t>(n + 1));
    for (std::size_t k = 1; k < fam.size(); ++k) CHECK(fam[k - 1].a_root > fam[k].a_root);
    for (const auto& p : fam) {
      CHECK(p.w == truncation_energy(n, 0.0, 1.0));
      CHECK(p.coeffs.size() == n + 1);
    }
  }
}

TEST_CASE("assembled solutions") {
  const auto p0 = assemble_solution(0, 0.0, 1.0, -0.5);
  CHECK(p0.w == 1.75);
  CHECK(p0.coeffs.size() == 1);

  const auto p1 = assemble_solution(1, 0.0, 1.0, 0.5);
  CHECK(p1.w == 3.75);
  CHECK(p1.coeffs[1] == doctest::Approx(1.0));

  const auto p2 = assemble_solution(1, 0.0, 1.0, -2.5, 2);
  CHECK(p2.coeffs[1] == doctest::Approx(-2.0));
  CHECK(p2.i == 2);
  CHECK(p2.model().a == -2.5);

  CHECK_THROWS_AS(assemble_solution(1, 0.0, 1.0, 0.3), NumericalError);
}

TEST_CASE("closure holds well past the polynomial degree") {
  for (int n = 0; n <= 8; ++n)
    for (double s : {0.0, 1.0, 2.5}) {
      for (const auto& p : truncation_family(n, s, 1.0)) {
        const auto c = truncation_series(n, s, 1.0, p.a_root, n + 10);
        const double scale = c.max_abs();
        for (int j = n + 1; j <= n + 10; ++j) CHECK(std::abs(c[j]) <= 1e-12 * scale);
        CHECK(closure_defect(n, s, 1.0, p.a_root) <= 1e-12);
      }
    }
}

TEST_CASE("every record keeps its own coupling") {
  const auto fam = truncation_family(3, 0.0, 1.0);
  for (std::size_t k = 0; k < fam.size(); ++k) {
    CHECK(fam[k].w == fam[0].w);
    if (k > 0) CHECK(fam[k].a_root != fam[0].a_root);
    const AnsatzWavefunction u(fam[k].model(), fam[k].coeffs);
    CHECK(ode_residual(fam[k].model(), fam[k].w, u, 1.0) <= 1e-9);
  }
}

TEST_CASE("assembled solutions are square integrable") {
  for (int n = 0; n <= 5; ++n)
    for (const auto& p : truncation_family(n, 0.0, 1.0)) {
      const AnsatzWavefunction u(p.model(), p.coeffs);
      auto norm = [&](double upper) {
        const double h = 1e-3;
        const int steps = static_cast<int>(std::lround(upper / h));
        double sum = 0.0;
        for (int k = 1; k < steps; ++k) {
          const double x = k * h;
          const double v = u(x);
          sum += (k % 2 == 1 ? 4.0 : 2.0) * v * v * x;
        }
        const double end = u(upper);
        return h / 3.0 * (sum + end * end * upper);
      };
      const double n12 = norm(12.0), n20 = norm(20.0);
      CHECK(std::isfinite(n12));
      CHECK(n12 > 0.0);
      CHECK(std::abs(n20 - n12) <= 1e-10 * n12);
    }
}

TEST_CASE("long double family agrees with double") {
  for (int n = 0; n <= 10; ++n) {
    const auto d = truncation_family(n, 0.0, 1.0);
    const auto w = truncation_family<long double>(n, 0.0L, 1.0L);
    REQUIRE(d.size() == w.size());
    for (std::size_t k = 0; k < d.size(); ++k)
      CHECK(std::abs(static_cast<long double>(d[k].a_root) - w[k].a_root) <=
            1e-12L * std::max(1.0L, std::abs(w[k].a_root)));
    for (const auto& p : w) CHECK(closure_defect<long double>(n, 0.0L, 1.0L, p.a_root) <= 1e-15L);
  }
}

TEST_CASE("Heun quadratic closed form") {
  const auto q1 = heun_quadratic_roots(1.0, 0.0);
  CHECK(q1.plus.real() == 5.0);
  CHECK(q1.minus.real() == -1.0);
  const auto q2 = heun_quadratic_roots(2.0, 0.0);
  CHECK(q2.discriminant == 0.0);
  CHECK(q2.plus.real() == -1.0);
  CHECK(q2.minus.real() == -1.0);
  CHECK(heun_quadratic_roots(1.0, 20.0).complex());
  CHECK_THROWS_AS(heun_quadratic_roots(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("Heun cubic closed form") {
  const auto c = heun_cubic(1.0, 0.0);
  CHECK(c[3] == 1.0);
  CHECK(c[2] == -23.0);
  CHECK(c[1] == -121.0);
  CHECK(c[0] == -97.0);
  const auto lin = heun_cubic(0.0, 1.0);
  CHECK(lin.degree() == 1);
  CHECK(lin[1] == -32.0);
  CHECK(lin[0] == -47.0);
}

TEST_CASE("general Heun truncation roots") {
  const auto r1 = heun_truncation_general(1, 1.0, 0.0);
  REQUIRE(r1.size() == 2);
  CHECK(r1[0] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(r1[1] == doctest::Approx(-1.0).epsilon(1e-14));

  const auto r2 = heun_truncation_general(2, 1.0, 0.0);
  const auto c2 = expand(real_roots(heun_cubic(1.0, 0.0)));
  REQUIRE(r2.size() == 3);
  REQUIRE(c2.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(r2[k] == doctest::Approx(c2[k]).epsilon(1e-12));

  for (double b : {0.5, 1.0, 2.0})
    for (double d : {-1.0, 0.0, 3.0}) {
      const auto r0 = heun_truncation_general(0, b, d);
      REQUIRE(r0.size() == 1);
      CHECK(r0[0] == doctest::Approx(-(b + d) / b));
    }

  const auto dbl = real_roots(heun_truncation_polynomial(1, 2.0, 0.0));
  REQUIRE(dbl.size() == 1);
  CHECK(dbl[0].multiplicity == 2);
  const auto flat = heun_truncation_general(1, 0.0, 1.0);
  REQUIRE(flat.size() == 1);
  CHECK(flat[0] == doctest::Approx(-0.875));
  const auto flat2 = heun_truncation_general(2, 0.0, 1.0);
  REQUIRE(flat2.size() == 1);
  CHECK(flat2[0] == doctest::Approx(-47.0 / 32.0));
}

TEST_CASE("Heun truncation roots close the Heun series") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> bdist(0.3, 2.5), ddist(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double b = bdist(rng), d = ddist(rng);
    for (int n0 = 1; n0 <= 4; ++n0)
      for (double a : heun_truncation_general(n0, b, d)) {
        if (!(a > -1.0)) continue;
        const double c = 2.0 * (n0 + 1) + a;
        const HeunParams h{a, b, c, d};
        const auto s = build_series([&](int j) { return heun_recurrence(h, j); }, n0 + 2);
        const double scale = s.max_abs();
        CHECK(std::abs(s[n0 + 1]) <= 1e-9 * scale);
        CHECK(std::abs(s[n0 + 2]) <= 1e-9 * scale);
      }
  }
}

TEST_CASE("Heun closed forms agree with the general roots on random samples") {
  std::mt19937_64 rng(20200101);
  std::uniform_real_distribution<double> bdist(0.2, 3.0), ddist(-5.0, 5.0);
  int samples = 0;
  while (samples < 100) {
    const double b = bdist(rng), d = ddist(rng);
    const auto q = heun_quadratic_roots(b, d);
    if (!(q.discriminant > 0.0)) continue;
    ++samples;
    const auto g1 = heun_truncation_general(1, b, d);
    REQUIRE(g1.size() == 2);
    CHECK(std::abs(g1[0] - q.plus.real()) <= 1e-10 * std::max(1.0, std::abs(q.plus.real())));
    CHECK(std::abs(g1[1] - q.minus.real()) <= 1e-10 * std::max(1.0, std::abs(q.minus.real())));
    const auto g2 = heun_truncation_general(2, b, d);
    const auto c2 = expand(real_roots(heun_cubic(b, d)));
    REQUIRE(g2.size() == c2.size());
    for (std::size_t k = 0; k < g2.size(); ++k)
      CHECK(std::abs(g2[k] - c2[k]) <= 1e-8 * std::max(1.0, std::abs(c2[k])));
  }
}
