// Acceptance suite: one line per criterion with the measured value, the
// tolerance and the wall time against its limit. Exit status is nonzero if
// any criterion fails.

#include "qes/cli.hpp"
#include "qes/multiprecision.hpp"
#include "qes/truncation.hpp"
#include "qes/variational.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

using namespace qes;

namespace {

struct Verdict {
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.note = std::string("exception: ") + e.what();
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = v.pass && elapsed < limit_s;
  if (!ok) ++failures;
  std::printf("[%s] criterion %d %s: measured=%.6g tolerance=%.6g runtime=%.3fs limit=%gs%s%s\n", ok ? "PASS" : "FAIL",
              id, title, v.measured, v.tolerance, elapsed, limit_s, v.note.empty() ? "" : " ", v.note.c_str());
  std::fflush(stdout);
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

int main() {
  criterion(1, "truncation-energy formula", 1.0, [] {
    int mismatches = 0;
    for (int n = 0; n <= 10; ++n)
      for (int twice_s : {0, 1, 2, 4})
        for (int b : {0, 1, 2}) {
          // 4 W = 8(n + s + 1) - b^2, an integer
          const long long four_w = 4LL * (2LL * n + twice_s + 2) - 1LL * b * b;
          const double w = truncation_energy(n, 0.5 * twice_s, b);
          if (4.0 * w != static_cast<double>(four_w)) ++mismatches;
        }
    return Verdict{mismatches == 0, static_cast<double>(mismatches), 0.0, "mismatches over 132 grid points"};
  });

  criterion(2, "closed-form agreement", 5.0, [] {
    std::mt19937_64 rng(20200101);
    std::uniform_real_distribution<double> bdist(0.2, 3.0), ddist(-5.0, 5.0);
    double quad = 0.0, cubic = 0.0;
    int samples = 0;
    bool counts = true;
    while (samples < 100) {
      const double b = bdist(rng), d = ddist(rng);
      const QuadraticRoots q = heun_quadratic_roots(b, d);
      if (!(q.discriminant > 0.0)) continue;
      ++samples;
      const auto g1 = heun_truncation_general(1, b, d);
      const auto g2 = heun_truncation_general(2, b, d);
      const auto c2 = expand(real_roots(heun_cubic(b, d)));
      if (g1.size() != 2 || g2.size() != c2.size()) {
        counts = false;
        continue;
      }
      quad = std::max({quad, rel(g1[0], q.plus.real()), rel(g1[1], q.minus.real())});
      for (std::size_t k = 0; k < g2.size(); ++k) cubic = std::max(cubic, rel(g2[k], c2[k]));
    }
    Verdict v{counts && quad <= 1e-10 && cubic <= 1e-8, quad, 1e-10, {}};
    char buf[96];
    std::snprintf(buf, sizeof buf, "(n0=1 quadratic; n0=2 cubic measured=%.3g tolerance=1e-08)", cubic);
    v.note = buf;
    return v;
  });

  criterion(3, "realness of truncation roots", 5.0, [] {
    int missing = 0;
    for (int n = 0; n <= 10; ++n) {
      missing += std::abs(static_cast<int>(expand(real_roots(truncation_polynomial_in_a(n, 0.0, 1.0))).size()) - (n + 1));
      missing += std::abs(
          static_cast<int>(expand(real_roots(truncation_polynomial_in_a<long double>(n, 0.0L, 1.0L))).size()) - (n + 1));
    }
    return Verdict{missing == 0, static_cast<double>(missing), 0.0,
                   "families n=0..10 short of n+1 real roots (double and long double)"};
  });

  criterion(4, "series closure and ODE residual", 10.0, [] {
    using Wide = long double;
    Wide closure = 0, residual = 0;
    double residual_double = 0.0;
    for (int n = 0; n <= 10; ++n) {
      for (const auto& p : truncation_family<Wide>(n, 0.0L, 1.0L)) {
        closure = std::max(closure, closure_defect<Wide>(n, 0.0L, 1.0L, p.a_root));
        const AnsatzWavefunction u(p.model(), p.coeffs);
        for (Wide x : {0.1L, 0.5L, 1.0L, 2.0L}) residual = std::max(residual, ode_residual(p.model(), p.w, u, x));
      }
      for (const auto& p : truncation_family(n, 0.0, 1.0)) {
        const AnsatzWavefunction u(p.model(), p.coeffs);
        for (double x : {0.1, 0.5, 1.0, 2.0})
          residual_double = std::max(residual_double, ode_residual(p.model(), p.w, u, x));
      }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "(closure measured=%.3g tolerance=1e-12; long double evaluation, double-precision residual %.3g)",
                  static_cast<double>(closure), residual_double);
    return Verdict{closure <= 1e-12L && residual <= 1e-10L, static_cast<double>(residual), 1e-10, buf};
  });

  criterion(5, "oscillator oracle", 1.0, [] {
    const auto sol = rayleigh_ritz({0.0, 0.0, 0.0}, BasisSpec<double>{20, 0.0, true});
    double worst = 0.0;
    for (int nu = 0; nu < 4; ++nu) worst = std::max(worst, std::abs(sol.eigenvalues(nu) - (2.0 + 4.0 * nu)));
    return Verdict{worst <= 1e-8, worst, 1e-8, "max |W_nu - (2 + 4 nu)|, nu <= 3, N = 20"};
  });

  criterion(6, "upper-bound monotonicity", 10.0, [] {
    HighPrecision rise(-1);
    for (double a : {-2.0, 0.0, 2.0}) {
      DenseVector<HighPrecision> prev;
      for (int n : {5, 10, 15, 20, 25}) {
        const auto sol = rayleigh_ritz<HighPrecision>(
            {0.0, a, 1.0}, BasisSpec<HighPrecision>{n, HighPrecision(0), true}, HighPrecision(0));
        const DenseVector<HighPrecision> cur = sol.eigenvalues.head(4);
        if (prev.size() != 0) rise = std::max(rise, HighPrecision((cur - prev).maxCoeff()));
        prev = cur;
      }
    }
    return Verdict{rise <= 0, static_cast<double>(rise), 0.0,
                   "max W_nu(N_next) - W_nu(N), nu <= 3, 100-digit arithmetic"};
  });

  criterion(7, "Hellmann-Feynman", 10.0, [] {
    double worst = 0.0;
    bool positive = true, crossing = false;
    for (double a : {-2.0, 0.0, 2.0})
      for (int nu = 0; nu <= 2; ++nu) {
        const auto r = hellmann_feynman_check<double>({0.0, a, 1.0}, nu, 1e-5, BasisSpec<double>{25, 0.0, true});
        worst = std::max({worst, r.rel_dev_a, r.rel_dev_b});
        positive = positive && r.positive;
        crossing = crossing || r.crossing;
      }
    return Verdict{worst <= 1e-4 && positive && !crossing, worst, 1e-4,
                   std::string("positive=") + (positive ? "yes" : "no") + " crossing=" + (crossing ? "yes" : "no")};
  });

  criterion(8, "figure reproduction", 120.0, [] {
    cli::RunConfig cfg;
    cfg.command = "figure";
    cfg.n_max = 4;
    const auto fig = cli::cmd_figure(cfg);
    double worst = 0.0;
    int unassigned = 0, in_range = 0;
    for (const auto& p : fig.assignments) {
      if (p.status == MatchStatus::OutOfRange) continue;
      ++in_range;
      worst = std::max(worst, p.residual);
      if (p.status != MatchStatus::Assigned || p.nu != p.i - 1) ++unassigned;
    }
    const bool vertical = fig.crowded_columns.empty() && fig.coincident_roots == 0;
    const bool pass = unassigned == 0 && in_range > 0 && worst <= 1e-5 && vertical;
    return Verdict{pass, worst, 1e-5,
                   std::to_string(in_range) + " in-grid points, " + std::to_string(unassigned) +
                       " off curve nu = i-1, vertical-line violations " + std::to_string(fig.crowded_columns.size())};
  });

  criterion(9, "determinism", 120.0, [] {
    cli::RunConfig cfg;
    cfg.command = "figure";
    const auto base = std::filesystem::temp_directory_path() / "qes_acceptance";
    std::filesystem::remove_all(base);
    cli::write_figure(cli::cmd_figure(cfg), base / "run1", cli::OutputFormat::Table);
    cli::write_figure(cli::cmd_figure(cfg), base / "run2", cli::OutputFormat::Table);
    int differing = 0;
    for (const char* f : {"curves.tsv", "points.tsv"}) {
      const std::string a = slurp(base / "run1" / f), b = slurp(base / "run2" / f);
      if (a.empty() || a != b) ++differing;
    }
    std::filesystem::remove_all(base);
    return Verdict{differing == 0, static_cast<double>(differing), 0.0, "data files differing between two runs"};
  });

  std::printf("%s\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED");
  return failures == 0 ? 0 : 1;
}
