#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "freelat/projectivity.hpp"
#include "freelat/rng.hpp"

using namespace freelat;

TEST_CASE("family construction checks its parameters", "[projectivity]") {
  CHECK_THROWS_AS(build_alpha(0, 0.5), ParameterError);
  CHECK_THROWS_AS(build_alpha(31, 0.5), ParameterError);
  CHECK_THROWS_AS(build_alpha(4, 0.0), ParameterError);
  CHECK_THROWS_AS(build_alpha(4, 1.5), ParameterError);

  const AlphaFamily fam = build_alpha(6, 0.5);
  CHECK(fam.N == 6);
  CHECK(fam.p == 0.5);
  CHECK(fam.exprs.size() == 6);
}

TEST_CASE("coordinate functionals invert the embedding exactly", "[projectivity]") {
  // The penalties are exact binary powers, so this is bit-exact, not
  // approximate.
  const AlphaFamily fam = build_alpha(7, 1.0);
  for (std::size_t n = 0; n < fam.N; ++n) {
    const std::vector<double> coords = beta_eval(fam.exprs[n], fam.N);
    for (std::size_t m = 0; m < fam.N; ++m)
      REQUIRE(coords[m] == (m == n ? 1.0 : 0.0));
  }

  CHECK_THROWS_AS(beta_eval(Expr::gen(5), 3), UnassignedGeneratorError);
}

TEST_CASE("family members are positive and pairwise disjoint", "[projectivity]") {
  const AlphaFamily fam = build_alpha(5, 0.5);
  Rng rng(111);
  ScalarAssignment a;
  std::vector<double> vals(fam.N);
  for (int trial = 0; trial < 1000; ++trial) {
    for (std::size_t j = 0; j < fam.N; ++j) a[static_cast<int>(j)] = rng.heavy_tailed();
    for (std::size_t n = 0; n < fam.N; ++n) {
      vals[n] = evaluate_scalar(fam.exprs[n], a);
      REQUIRE(vals[n] >= 0.0);
    }
    // The positive part clips the loser to exactly 0.0, so the pairwise
    // minimum is exactly zero; no tolerance needed.
    for (std::size_t n = 0; n < fam.N; ++n)
      for (std::size_t m = n + 1; m < fam.N; ++m)
        REQUIRE(std::min(vals[n], vals[m]) == 0.0);
  }
}

TEST_CASE("disjointness audit reports clean", "[projectivity]") {
  const AlphaFamily fam = build_alpha(5, 1.0);
  const DisjointnessReport rep = alpha_disjointness(fam, 2000, 17);
  CHECK(rep.trials == 2000);
  CHECK(rep.violations == 0);
  CHECK(rep.worst_pair_min == 0.0);

  const DisjointnessReport again = alpha_disjointness(fam, 2000, 17);
  CHECK(again.worst_pair_min == rep.worst_pair_min);
}

TEST_CASE("norm sandwich pins the l_p coefficient norm", "[projectivity]") {
  const AlphaFamily fam = build_alpha(6, 0.5);
  const SearchBudget budget{6, 8, 60};

  SECTION("basis coefficient") {
    std::vector<double> a(6, 0.0);
    a[2] = 1.0;
    const SandwichReport rep = alpha_norm_sandwich(fam, a, budget, 21);
    CHECK(rep.target == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(rep.lower == Catch::Approx(1.0).epsilon(1e-9));
    CHECK(rep.upper == Catch::Approx(1.0).epsilon(1e-12));
  }

  SECTION("random coefficients") {
    Rng rng(2200);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> a(6);
      for (double& c : a) c = rng.uniform(-2.0, 2.0);
      a[0] = 1.0;  // keep the vector clearly nonzero
      double acc = 0.0;
      for (double c : a) acc += std::sqrt(std::fabs(c));
      const double target = acc * acc;

      const SandwichReport rep = alpha_norm_sandwich(fam, a, budget, 500 + trial);
      CHECK(rep.target == Catch::Approx(target).epsilon(1e-12));
      CHECK(rep.lower == Catch::Approx(rep.target).epsilon(1e-9));
      CHECK(rep.upper == Catch::Approx(rep.target).epsilon(1e-12));
    }
  }

  SECTION("validation") {
    CHECK_THROWS_AS(alpha_norm_sandwich(fam, {1.0, 0.0}, budget, 1), DimensionError);
    CHECK_THROWS_AS(alpha_norm_sandwich(fam, std::vector<double>(6, 0.0), budget, 1),
                    ParameterError);
  }
}

TEST_CASE("ball geometry forces intersections", "[projectivity]") {
  for (double p : {0.5, 1.0}) {
    const BallFamilyReport rep = ball_family_check(p, 2000, 33, 16);
    INFO("p = " << p);
    CHECK(rep.trials == 2000);
    CHECK(rep.intersect_failures == 0);
    CHECK(rep.disjoint_fit_failures == 0);
    CHECK(rep.quasi_triangle_failures == 0);
  }

  // Below p = 1/2 the no-disjoint-pair conclusion is not guaranteed, so only
  // the quasi-triangle inequality is load-bearing.
  const BallFamilyReport small = ball_family_check(0.25, 1000, 33, 16);
  CHECK(small.quasi_triangle_failures == 0);

  CHECK_THROWS_AS(ball_family_check(0.0, 10, 1), ParameterError);
  CHECK_THROWS_AS(ball_family_check(0.5, 10, 1, 1), ParameterError);
}
