#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "freelat/lattice.hpp"
#include "freelat/rng.hpp"

using namespace freelat;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("quasi-norm closed forms", "[lattice]") {
  const CoordinateLattice l2 = CoordinateLattice::weighted_lr(2.0, 3);
  CHECK(l2.quasi_norm({3.0, 4.0, 0.0}) == Catch::Approx(5.0).epsilon(1e-15));

  const CoordinateLattice linf = CoordinateLattice::weighted_lr(kInf, 3);
  CHECK(linf.quasi_norm({3.0, -4.0, 1.0}) == 4.0);

  const CoordinateLattice lhalf = CoordinateLattice::weighted_lr(0.5, 2);
  CHECK(lhalf.quasi_norm({1.0, 1.0}) == Catch::Approx(4.0).epsilon(1e-14));

  // grid weights scale mass like an integral over [0, 1]
  const CoordinateLattice grid = CoordinateLattice::lp_grid(1.0, 4);
  CHECK(grid.quasi_norm({1.0, 1.0, 1.0, 1.0}) == Catch::Approx(1.0).epsilon(1e-15));

  const CoordinateLattice weighted = CoordinateLattice::weighted_lr(1.0, 2, {0.5, 2.0});
  CHECK(weighted.quasi_norm({2.0, 1.0}) == Catch::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("lattice construction validates", "[lattice]") {
  CHECK_THROWS_AS(CoordinateLattice::weighted_lr(0.0, 3), ParameterError);
  CHECK_THROWS_AS(CoordinateLattice::weighted_lr(-1.0, 3), ParameterError);
  CHECK_THROWS_AS(CoordinateLattice::weighted_lr(1.0, 0), ParameterError);
  CHECK_THROWS_AS(CoordinateLattice::weighted_lr(1.0, 2, {1.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(CoordinateLattice::weighted_lr(1.0, 2, {1.0}), DimensionError);
  CHECK_THROWS_AS(CoordinateLattice::lp_grid(0.5, 0), ParameterError);
  CHECK_THROWS_AS(CoordinateLattice::weighted_lr(1.0, 2).quasi_norm({1.0}), DimensionError);
}

TEST_CASE("spec strings parse", "[lattice]") {
  const CoordinateLattice grid = CoordinateLattice::parse("lpgrid:0.5:4");
  CHECK(grid.dim() == 4);
  CHECK(grid.exponent() == 0.5);
  CHECK(grid.weights()[0] == 0.25);

  const CoordinateLattice winf = CoordinateLattice::parse("weightedlr:inf:3");
  CHECK(winf.exponent() == kInf);

  const CoordinateLattice ww = CoordinateLattice::parse("weightedlr:1:2:0.5,2");
  CHECK(ww.weights() == std::vector<double>{0.5, 2.0});

  CHECK_THROWS_AS(CoordinateLattice::parse("cube:3"), ParseError);
  CHECK_THROWS_AS(CoordinateLattice::parse("lpgrid:0.5"), ParseError);
  CHECK_THROWS_AS(CoordinateLattice::parse("lpgrid:0.5:x"), ParseError);
  CHECK_THROWS_AS(CoordinateLattice::parse("weightedlr:1:2:0.5"), DimensionError);
}

TEST_CASE("quasi-triangle modulus", "[lattice]") {
  CHECK(CoordinateLattice::weighted_lr(1.0, 2).delta() == 1.0);
  CHECK(CoordinateLattice::weighted_lr(2.0, 2).delta() == 1.0);
  CHECK(CoordinateLattice::weighted_lr(0.5, 2).delta() == Catch::Approx(2.0).epsilon(1e-15));
  CHECK(CoordinateLattice::weighted_lr(0.25, 2).delta() == Catch::Approx(8.0).epsilon(1e-14));

  // ||x + y|| <= delta (||x|| + ||y||) on random data
  Rng rng(derive_seed(43, "lattice-delta"));
  for (int trial = 0; trial < 2000; ++trial) {
    const double r = 0.25 + 0.25 * (trial % 4);
    const std::size_t d = 2 + rng.below(6);
    const CoordinateLattice L = CoordinateLattice::weighted_lr(r, d);
    std::vector<double> x(d), y(d), s(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rng.heavy_tailed();
      y[j] = rng.heavy_tailed();
      s[j] = x[j] + y[j];
    }
    const double bound = L.delta() * (L.quasi_norm(x) + L.quasi_norm(y));
    CHECK(L.quasi_norm(s) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("basis tuple attains the grid convexity constant", "[lattice]") {
  // For the unweighted d-point space with exponent r and convexity exponent
  // 1 the best possible ratio is d^(1/r - 1), attained by the basis tuple.
  for (auto [r, d] : {std::pair{0.5, 4}, {0.25, 3}, {1.0, 5}}) {
    const CoordinateLattice L = CoordinateLattice::weighted_lr(r, static_cast<std::size_t>(d));
    std::vector<std::vector<double>> basis;
    for (int j = 0; j < d; ++j) {
      std::vector<double> e(static_cast<std::size_t>(d), 0.0);
      e[static_cast<std::size_t>(j)] = 1.0;
      basis.push_back(std::move(e));
    }
    const double want = std::pow(static_cast<double>(d), 1.0 / r - 1.0);
    CHECK(convexity_ratio(L, basis, 1.0) == Catch::Approx(want).epsilon(1e-12));

    const ConvexityReport rep = p_convexity_lower_bound(L, 1.0, 300, 99);
    CHECK(rep.bound == Catch::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("matched exponent gives ratio one", "[lattice]") {
  Rng rng(derive_seed(43, "lattice-matched"));
  for (int trial = 0; trial < 200; ++trial) {
    const double r = 0.25 + rng.uniform01() * 0.75;
    const std::size_t d = 2 + rng.below(6);
    std::vector<double> w(d);
    for (double& v : w) v = rng.uniform(0.1, 3.0);
    const CoordinateLattice L(r, w);
    const std::size_t k = 1 + rng.below(4);
    std::vector<std::vector<double>> tuple(k, std::vector<double>(d));
    for (auto& x : tuple)
      for (double& v : x) v = rng.heavy_tailed();
    CHECK(convexity_ratio(L, tuple, r) == Catch::Approx(1.0).epsilon(1e-12));
  }
  const CoordinateLattice grid = CoordinateLattice::lp_grid(0.5, 16);
  const ConvexityReport rep = p_convexity_lower_bound(grid, 0.5, 200, 99);
  CHECK(rep.bound == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convexity reports replay their witness", "[lattice]") {
  const CoordinateLattice L = CoordinateLattice::weighted_lr(0.5, 4);
  for (double p : {0.25, 0.5, 1.0}) {
    const ConvexityReport rep = p_convexity_lower_bound(L, p, 150, 7);
    REQUIRE_FALSE(rep.witness.empty());
    CHECK(convexity_ratio(L, rep.witness, p) == rep.bound);
  }
}

TEST_CASE("convexity scan is monotone in the exponent", "[lattice]") {
  const CoordinateLattice L = CoordinateLattice::weighted_lr(0.5, 4);
  const auto scan = convexity_monotonicity_scan(L, {0.25, 0.5, 0.75, 1.0}, 250, 7);
  REQUIRE(scan.size() == 4);
  for (std::size_t i = 0; i + 1 < scan.size(); ++i)
    CHECK(scan[i].bound <= scan[i + 1].bound + 1e-12);
  CHECK_THROWS_AS(convexity_monotonicity_scan(L, {0.5, 0.5}, 10, 7), ParameterError);
  CHECK_THROWS_AS(convexity_monotonicity_scan(L, {}, 10, 7), ParameterError);
}

TEST_CASE("convexity ratio validates tuples", "[lattice]") {
  const CoordinateLattice L = CoordinateLattice::weighted_lr(0.5, 2);
  CHECK_THROWS_AS(convexity_ratio(L, {}, 1.0), ParameterError);
  CHECK_THROWS_AS(convexity_ratio(L, {{0.0, 0.0}}, 1.0), ParameterError);
  CHECK_THROWS_AS(convexity_ratio(L, {{1.0}}, 1.0), DimensionError);
  CHECK_THROWS_AS(convexity_ratio(L, {{1.0, 0.0}}, 0.0), ParameterError);
}

TEST_CASE("convexification turns the exponent-r space into a normed one", "[lattice]") {
  // With p = r the p-convexification of the d-point exponent-r space carries
  // the l1 norm, so the oplus operation satisfies the triangle inequality.
  Rng rng(derive_seed(43, "lattice-convexify"));
  for (int trial = 0; trial < 200; ++trial) {
    const double r = 0.25 + rng.uniform01() * 0.75;
    const std::size_t d = 2 + rng.below(5);
    const CoordinateLattice L = CoordinateLattice::weighted_lr(r, d);
    std::vector<double> x(d), y(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = std::fabs(rng.heavy_tailed());
      y[j] = std::fabs(rng.heavy_tailed());
    }
    const double lhs = convexify_norm(L, convexify_oplus(L, x, y, r), r);
    const double rhs = convexify_norm(L, x, r) + convexify_norm(L, y, r);
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
  const CoordinateLattice L = CoordinateLattice::weighted_lr(0.5, 2);
  CHECK_THROWS_AS(convexify_oplus(L, {1.0, -1.0}, {1.0, 1.0}, 0.5), ParameterError);
  CHECK_THROWS_AS(convexify_oplus(L, {1.0, 1.0}, {1.0, 1.0}, 1.5), ParameterError);
}

TEST_CASE("disjointness criterion and the norm lower bound", "[lattice]") {
  const CoordinateLattice L = CoordinateLattice::weighted_lr(0.5, 4);
  CHECK(disjointness_criterion(L, {1.0, 0.0, 2.0, 0.0}, {0.0, 3.0, 0.0, 0.0}));
  CHECK_FALSE(disjointness_criterion(L, {1.0, 0.0, 2.0, 0.0}, {0.5, 3.0, 0.0, 0.0}));
  CHECK_THROWS_AS(disjointness_criterion(L, {1.0, -1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0}),
                  ParameterError);

  Rng rng(derive_seed(43, "lattice-disjoint"));
  for (int trial = 0; trial < 2000; ++trial) {
    const double r = 0.25 + 0.25 * (trial % 4);
    const std::size_t d = 2 + rng.below(6);
    const CoordinateLattice L2 = CoordinateLattice::weighted_lr(r, d);
    std::vector<double> x(d, 0.0), y(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      const double v = std::fabs(rng.heavy_tailed());
      (rng.next() & 1u ? x[j] : y[j]) = v;
    }
    REQUIRE(disjointness_criterion(L2, x, y));
    const double nx = L2.quasi_norm(x);
    CHECK(L2.quasi_norm(vec_sub(x, y)) >= nx - 1e-12 * std::max(1.0, nx));
  }
}

TEST_CASE("l-convexity witness checking is mechanical", "[lattice]") {
  const CoordinateLattice L = CoordinateLattice::lp_grid(0.5, 2);
  const std::vector<double> u{1.0, 1.0};  // ((1/2)(1 + 1))^2 = 1

  // spikes of small quasi-norm whose average stays proportionally large
  CHECK(l_convexity_violation(L, u, {{0.5, 0.0}, {0.0, 0.5}}, 0.95));
  // the same spikes are no violation at a small epsilon
  CHECK_FALSE(l_convexity_violation(L, u, {{0.5, 0.0}, {0.0, 0.5}}, 0.2));
  // full copies of u have norm 1, never below epsilon
  CHECK_FALSE(l_convexity_violation(L, u, {u, u}, 0.5));

  CHECK_THROWS_AS(l_convexity_violation(L, {2.0, 2.0}, {u}, 0.5), ParameterError);
  CHECK_THROWS_AS(l_convexity_violation(L, u, {{1.5, 0.0}}, 0.5), ParameterError);
  CHECK_THROWS_AS(l_convexity_violation(L, u, {u}, 0.0), ParameterError);
  CHECK_THROWS_AS(l_convexity_violation(L, u, {u}, 1.0), ParameterError);
  CHECK_THROWS_AS(l_convexity_violation(L, u, {}, 0.5), ParameterError);
}
