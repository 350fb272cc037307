#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "freelat/stable.hpp"

using namespace freelat;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Closed forms used as oracles, both evaluated through std::lgamma so they
// share no code with the implementation under test.
double cauchy_moment(double p) { return std::pow(1.0 / std::cos(p * kPi / 2.0), 1.0 / p); }

double gaussian_moment(double p) {
  return 2.0 * std::pow(std::exp(std::lgamma((p + 1.0) / 2.0)) / std::sqrt(kPi), 1.0 / p);
}
}  // namespace

TEST_CASE("log gamma agrees with the C library", "[stable]") {
  for (double x = 1e-3; x < 50.0; x *= 1.17) {
    const double got = log_gamma(x);
    const double want = std::lgamma(x);
    CHECK(std::fabs(got - want) <= 1e-11 * std::max(1.0, std::fabs(want)));
  }
  CHECK(std::exp(log_gamma(0.5)) == Catch::Approx(std::sqrt(kPi)).epsilon(1e-13));
  double factorial = 1.0;
  for (int n = 1; n <= 20; ++n) {
    CHECK(std::exp(log_gamma(n)) == Catch::Approx(factorial).epsilon(1e-12));
    factorial *= n;
  }
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
}

TEST_CASE("moment constant against the Cauchy closed form", "[stable]") {
  for (double p = 0.05; p < 0.999; p += 0.05)
    CHECK(a_pq(p, 1.0) == Catch::Approx(cauchy_moment(p)).epsilon(1e-12));
  CHECK(a_pq(0.5, 1.0) == Catch::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("moment constant against the Gaussian closed form", "[stable]") {
  for (double p = 0.1; p < 1.999; p += 0.1)
    CHECK(a_pq(p, 2.0) == Catch::Approx(gaussian_moment(p)).epsilon(1e-12));
  CHECK(a_pq(1.0, 2.0) == Catch::Approx(2.0 / std::sqrt(kPi)).epsilon(1e-13));
}

TEST_CASE("moment constant domain", "[stable]") {
  CHECK_THROWS_AS(a_pq(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(a_pq(1.5, 1.0), DomainError);
  CHECK_THROWS_AS(a_pq(0.5, 2.5), DomainError);
  CHECK_THROWS_AS(a_pq(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(a_pq(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(a_pq(-0.5, 1.0), ParameterError);
  try {
    a_pq(1.0, 1.0);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("p must be < q") != std::string::npos);
  }
}

TEST_CASE("small-p limit", "[stable]") {
  CHECK(a_pq_limit(1.0) == 1.0);
  CHECK(a_pq_limit(2.0) == Catch::Approx(std::exp(-kEulerGamma / 2.0)).epsilon(1e-15));
  for (double q : {0.5, 1.0, 1.5, 2.0})
    CHECK(a_pq(1e-6, q) == Catch::Approx(a_pq_limit(q)).margin(1e-5));
  CHECK_THROWS_AS(a_pq_limit(0.0), DomainError);
  CHECK_THROWS_AS(a_pq_limit(2.3), DomainError);
}

TEST_CASE("stable samples are deterministic with prefix stability", "[stable]") {
  StableSpec spec;
  spec.q = 1.3;
  spec.n = (1u << 16) + 7;
  spec.seed = 99;
  const std::vector<double> a = sample_stable(spec);
  const std::vector<double> b = sample_stable(spec);
  CHECK(a == b);

  StableSpec longer = spec;
  longer.n = 2 * (1u << 16);
  const std::vector<double> c = sample_stable(longer);
  for (std::size_t i = 0; i < spec.n; ++i) REQUIRE(a[i] == c[i]);

  for (double v : a) REQUIRE(std::isfinite(v));
  CHECK_THROWS_AS(sample_stable(StableSpec{2.5, 10, 0}), DomainError);
  CHECK_THROWS_AS(sample_stable(StableSpec{1.0, 0, 0}), ParameterError);
}

TEST_CASE("q = 1 sampling matches the Cauchy law", "[stable]") {
  StableSpec spec;
  spec.q = 1.0;
  spec.n = 20001;
  spec.seed = 5;
  std::vector<double> s = sample_stable(spec);
  for (double& v : s) v = std::fabs(v);
  std::nth_element(s.begin(), s.begin() + 10000, s.end());
  // the median of |Cauchy| is tan(pi/4) = 1
  CHECK(s[10000] == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("q = 2 sampling matches N(0, 2)", "[stable]") {
  StableSpec spec;
  spec.q = 2.0;
  spec.n = 50000;
  spec.seed = 5;
  const std::vector<double> s = sample_stable(spec);
  double mean = 0.0, var = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  for (double v : s) var += (v - mean) * (v - mean);
  var /= static_cast<double>(s.size() - 1);
  CHECK(mean == Catch::Approx(0.0).margin(0.03));
  CHECK(var == Catch::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Monte Carlo estimate is consistent and thread invariant", "[stable]") {
  for (auto [p, q] : {std::pair{0.4, 1.0}, {0.7, 1.5}, {1.0, 2.0}}) {
    const MonteCarloEstimate one = a_pq_monte_carlo(p, q, 200000, 11, 1);
    const MonteCarloEstimate four = a_pq_monte_carlo(p, q, 200000, 11, 4);
    CHECK(one.estimate == four.estimate);
    CHECK(one.stderr_ == four.stderr_);
    CHECK(std::fabs(one.estimate - a_pq(p, q)) <= 4.0 * one.stderr_);
    CHECK(one.stderr_ > 0.0);
    CHECK(one.n == 200000);
  }
}

TEST_CASE("variance finiteness tracks 2p < q", "[stable]") {
  CHECK(a_pq_monte_carlo(0.4, 1.0, 1000, 1).variance_finite);
  CHECK_FALSE(a_pq_monte_carlo(0.6, 1.0, 1000, 1).variance_finite);
  CHECK_FALSE(a_pq_monte_carlo(0.5, 1.0, 1000, 1).variance_finite);
  CHECK(a_pq_monte_carlo(0.9, 2.0, 1000, 1).variance_finite);
}

TEST_CASE("factorization bound composes the two constants", "[stable]") {
  const FactorizationBound b = mn_constant_bound(0.3, 0.5, 1.0, 1.25);
  CHECK(b.bound == Catch::Approx(1.25 * a_pq(0.5, 1.0) / a_pq(0.3, 1.0)).epsilon(1e-14));
  CHECK(1.0 / b.s == Catch::Approx(1.0 / 0.3 - 1.0 / 0.5).epsilon(1e-14));
  CHECK_THROWS_AS(mn_constant_bound(0.5, 0.5, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(mn_constant_bound(0.6, 0.5, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(mn_constant_bound(0.3, 0.5, 1.0, 0.5), ParameterError);
}

TEST_CASE("uniform bound scan recomputes per row", "[stable]") {
  const ScanResult scan = uniform_bound_scan(0.5, 1.0, linspace(0.01, 0.45, 45));
  REQUIRE(scan.rows.size() == 45);
  double max_seen = 0.0;
  for (const auto& row : scan.rows) {
    CHECK(row.a_pq_value == Catch::Approx(a_pq(row.p, 1.0)).epsilon(1e-14));
    CHECK(row.ratio == Catch::Approx(a_pq(0.5, 1.0) / a_pq(row.p, 1.0)).epsilon(1e-14));
    max_seen = std::max(max_seen, row.ratio);
  }
  CHECK(scan.max_ratio == max_seen);
  // A_{p,1} grows in p, so the ratio against the fixed numerator decays
  for (std::size_t i = 0; i + 1 < scan.rows.size(); ++i)
    CHECK(scan.rows[i].ratio > scan.rows[i + 1].ratio);
  CHECK_THROWS_AS(uniform_bound_scan(0.5, 1.0, {}), ParameterError);
  CHECK_THROWS_AS(uniform_bound_scan(0.5, 1.0, {1.2}), DomainError);
}

TEST_CASE("linspace hits both endpoints", "[stable]") {
  const std::vector<double> g = linspace(1e-4, 0.499, 200);
  REQUIRE(g.size() == 200);
  CHECK(g.front() == 1e-4);
  CHECK(g.back() == 0.499);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK_THROWS_AS(linspace(0.0, 1.0, 1), ParameterError);
  CHECK_THROWS_AS(linspace(1.0, 0.0, 5), ParameterError);
}
