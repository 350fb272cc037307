#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "freelat/hilbert.hpp"

using namespace freelat;

namespace {

// Adaptive Simpson quadrature, used to integrate 1/(x-t) away from the
// singularity.
double simpson(double (*f)(double, double), double x, double a, double b, double fa, double fm,
               double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(x, lm), frm = f(x, rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, x, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
         simpson(f, x, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

double integrate(double x, double a, double b, double tol) {
  auto f = [](double xx, double t) { return 1.0 / (xx - t); };
  return simpson(f, x, a, b, f(x, a), f(x, 0.5 * (a + b)), f(x, b), tol, 40);
}

// Principal value of the integral of dt/(x-t) over [a, b]. Inside the
// interval a symmetric window around x cancels exactly, leaving two regular
// integrals.
double pv_oracle(double a, double b, double x) {
  if (x < a || x > b) return integrate(x, a, b, 1e-12);
  const double eps = 0.5 * std::min(x - a, b - x);
  return integrate(x, a, x - eps, 1e-12) + integrate(x, x + eps, b, 1e-12);
}

}  // namespace

TEST_CASE("indicator transform equals the principal-value integral", "[hilbert]") {
  const double cases[][3] = {
      {0.0, 1.0, 2.0},   {0.0, 1.0, -0.7}, {0.0, 1.0, 0.3},  {0.0, 1.0, 0.5},
      {0.25, 0.5, 0.26}, {0.25, 0.5, 0.49}, {0.1, 0.9, 0.89}, {0.0, 0.125, 7.0},
  };
  for (const auto& c : cases) {
    const double got = hilbert_indicator(c[0], c[1], c[2]);
    const double want = pv_oracle(c[0], c[1], c[2]);
    CHECK(got == Catch::Approx(want).epsilon(1e-6).margin(1e-6));
  }
  CHECK_THROWS_AS(hilbert_indicator(0.0, 1.0, 0.0), SingularityError);
  CHECK_THROWS_AS(hilbert_indicator(0.0, 1.0, 1.0), SingularityError);
  CHECK_THROWS_AS(hilbert_indicator(1.0, 0.0, 0.5), ParameterError);
}

TEST_CASE("comb minimum telescopes to log(2n - 1)", "[hilbert]") {
  for (std::size_t n : {1, 2, 3, 4, 8, 16, 32, 64}) {
    const double x = 1.0 / (2.0 * static_cast<double>(n));
    const double want = std::log(2.0 * static_cast<double>(n) - 1.0);
    CHECK(f_n(n, x) == Catch::Approx(want).epsilon(1e-12).margin(1e-12));
  }
  CHECK_THROWS_AS(f_n(0, 0.3), ParameterError);
  CHECK_THROWS_AS(f_n(4, 0.25), SingularityError);
  CHECK_THROWS_AS(f_n(4, 0.0), SingularityError);
}

TEST_CASE("comb is symmetric about one half", "[hilbert]") {
  for (std::size_t n : {1, 3, 8, 21}) {
    for (int s = 0; s < 200; ++s) {
      const double x = (static_cast<double>(s) + 0.37) / 200.0;
      CHECK(f_n(n, x) == Catch::Approx(f_n(n, 1.0 - x)).epsilon(1e-10).margin(1e-10));
    }
  }
}

TEST_CASE("structure lemma holds on a spread of n", "[hilbert]") {
  for (std::size_t n : {1, 2, 3, 5, 8, 13, 21, 34}) {
    const LemmaCheck c = f_n_lemma_check(n);
    INFO("n = " << n << ", worst symmetry gap " << c.worst_symmetry_gap);
    CHECK(c.symmetry);
    CHECK(c.cell_unimodal);
    CHECK(c.minima_ordered);
    CHECK(c.all());
  }
}

TEST_CASE("weak-L1 estimate on a hand-checked grid", "[hilbert]") {
  GridFunction g;
  g.values = {3.0, 1.0, 2.0};
  CHECK(weak_l1_norm(g) == Catch::Approx(4.0 / 3.0).epsilon(1e-15));

  GridFunction doubled = g;
  for (double& v : doubled.values) v *= 2.0;
  CHECK(weak_l1_norm(doubled) == Catch::Approx(8.0 / 3.0).epsilon(1e-15));

  GridFunction empty;
  CHECK_THROWS_AS(weak_l1_norm(empty), ParameterError);
}

TEST_CASE("midpoint grids dodge the singular lattice", "[hilbert]") {
  // 33 cells put a midpoint exactly on the singularity of F_2 at 1/2, so the
  // cell count is bumped until the midpoints are clean.
  CHECK(f_n_grid(2, 32).values.size() == 32);
  CHECK(f_n_grid(2, 33).values.size() == 34);
  for (double v : f_n_grid(2, 33).values) REQUIRE(std::isfinite(v));
  CHECK_THROWS_AS(f_n_grid(2, 31), ResolutionError);
  CHECK_THROWS_AS(f_n_grid(0, 100), ParameterError);
}

TEST_CASE("divergence rows track the predicted minimum", "[hilbert]") {
  for (std::size_t n : {1, 3, 10}) {
    const DivergenceRow row = divergence_row(n, std::max<std::size_t>(10001, 16 * n));
    CHECK(row.predicted_min == Catch::Approx(std::log(2.0 * n - 1.0)).epsilon(1e-15));
    CHECK(std::fabs(row.grid_min - row.predicted_min) <= 1e-3);
    CHECK(row.weak_l1 > 0.0);
  }
}

TEST_CASE("weak-L1 grows along the doubling sequence", "[hilbert]") {
  const std::vector<DivergenceRow> rows = divergence_table({1, 2, 4}, 10001);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].weak_l1 < rows[1].weak_l1);
  CHECK(rows[1].weak_l1 < rows[2].weak_l1);
  CHECK_THROWS_AS(divergence_table({}, 1000), ParameterError);
  CHECK_THROWS_AS(divergence_table({64}, 1000), ResolutionError);
}
