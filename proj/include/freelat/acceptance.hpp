#ifndef FREELAT_ACCEPTANCE_HPP
#define FREELAT_ACCEPTANCE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "freelat/expr.hpp"
#include "freelat/free_norm.hpp"
#include "freelat/hilbert.hpp"
#include "freelat/lattice.hpp"
#include "freelat/projectivity.hpp"
#include "freelat/rng.hpp"
#include "freelat/stable.hpp"

// The library's acceptance gate: a fixed battery of numerical checks with
// pinned seeds and tolerances, runnable from the CLI (`self-test`) and from
// the dedicated test binary. Every check states a quantitative claim the
// library must reproduce; none of them may be loosened to make a run pass.

namespace freelat::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

namespace detail {

class Check {
public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!first_failure_.empty()) first_failure_ += "; ";
      first_failure_ += what;
    }
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += ", ";
    notes_ += s;
  }
  bool pass() const { return pass_; }
  std::string summary() const {
    if (pass_) return notes_;
    return notes_.empty() ? first_failure_ : first_failure_ + " [" + notes_ + "]";
  }

private:
  bool pass_ = true;
  std::string first_failure_;
  std::string notes_;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Random expression over generators 0..max_gen-1; bounded depth and
/// moderate scalars keep rounding noise far below the 1e-12 gates.
inline Expr random_expr(Rng& rng, int max_gen, int depth) {
  if (depth <= 0 || rng.uniform01() < 0.2)
    return Expr::gen(static_cast<int>(rng.below(static_cast<std::uint64_t>(max_gen))));
  switch (rng.below(7)) {
    case 0:
      return Expr::scale(rng.uniform(-2.0, 2.0), random_expr(rng, max_gen, depth - 1));
    case 1:
      return Expr::add(random_expr(rng, max_gen, depth - 1), random_expr(rng, max_gen, depth - 1));
    case 2:
      return Expr::sup(random_expr(rng, max_gen, depth - 1), random_expr(rng, max_gen, depth - 1));
    case 3:
      return Expr::inf(random_expr(rng, max_gen, depth - 1), random_expr(rng, max_gen, depth - 1));
    case 4:
      return Expr::abs(random_expr(rng, max_gen, depth - 1));
    case 5:
      return Expr::pos(random_expr(rng, max_gen, depth - 1));
    default: {
      std::vector<Expr> children;
      const std::size_t m = 1 + rng.below(3);
      for (std::size_t i = 0; i < m; ++i)
        children.push_back(random_expr(rng, max_gen, depth - 1));
      return Expr::power_sum(rng.uniform(0.4, 3.0), std::move(children));
    }
  }
}

// -- criteria ----------------------------------------------------------------

inline CriterionResult c01_cauchy_half_moment(int threads) {
  Check c;
  const double v = a_pq(0.5, 1.0);
  c.require(std::fabs(v - 2.0) <= 1e-9, "closed form A_{1/2,1} != 2 (got " + fmt(v) + ")");
  const MonteCarloEstimate mc = a_pq_monte_carlo(0.5, 1.0, 1000000, 7, threads);
  c.require(std::fabs(mc.estimate - 2.0) <= 4.0 * mc.stderr_,
            "Monte Carlo " + fmt(mc.estimate) + " not within 4 se (" + fmt(mc.stderr_) + ") of 2");
  c.note("closed=" + fmt(v) + " mc=" + fmt(mc.estimate) + " se=" + fmt(mc.stderr_));
  return {1, "cauchy-half-moment", c.pass(), c.summary()};
}

inline CriterionResult c02_gaussian_first_moment(int threads) {
  Check c;
  const double want = 2.0 / std::sqrt(3.14159265358979323846);
  const double v = a_pq(1.0, 2.0);
  c.require(std::fabs(v - want) <= 1e-9, "closed form A_{1,2} != 2/sqrt(pi) (got " + fmt(v) + ")");
  const MonteCarloEstimate mc = a_pq_monte_carlo(1.0, 2.0, 1000000, 7, threads);
  c.require(std::fabs(mc.estimate - want) <= 4.0 * mc.stderr_,
            "Monte Carlo " + fmt(mc.estimate) + " not within 4 se of " + fmt(want));
  c.note("closed=" + fmt(v) + " mc=" + fmt(mc.estimate) + " se=" + fmt(mc.stderr_));
  return {2, "gaussian-first-moment", c.pass(), c.summary()};
}

inline CriterionResult c03_small_p_limit() {
  Check c;
  for (double q : {0.5, 1.0, 1.5}) {
    const double v = a_pq(1e-3, q);
    const double lim = a_pq_limit(q);
    c.require(std::fabs(v - lim) <= 1e-2,
              "A_{1e-3," + fmt(q) + "} = " + fmt(v) + " vs limit " + fmt(lim));
  }
  return {3, "small-p-limit", c.pass(), c.summary()};
}

inline CriterionResult c04_uniform_ratio_scan() {
  Check c;
  const ScanResult scan = uniform_bound_scan(0.5, 1.0, linspace(1e-4, 0.499, 200));
  c.require(std::isfinite(scan.max_ratio) && scan.max_ratio <= 2.2,
            "max ratio " + fmt(scan.max_ratio) + " exceeds 2.2");
  const double left = scan.rows.front().ratio;
  c.require(std::fabs(left - 2.0) <= 0.02,
            "left-endpoint ratio " + fmt(left) + " not within 1% of 2");
  c.note("max=" + fmt(scan.max_ratio) + " left=" + fmt(left));
  return {4, "uniform-ratio-scan", c.pass(), c.summary()};
}

inline CriterionResult c05_comb_minimum() {
  Check c;
  double last = 0.0;
  for (std::size_t n : {1, 2, 4, 8, 16, 32, 64}) {
    const DivergenceRow row = divergence_row(n, 10001);
    const double want = std::log(2.0 * static_cast<double>(n) - 1.0);
    c.require(std::fabs(row.grid_min - want) <= 1e-3,
              "min of F_" + std::to_string(n) + " = " + fmt(row.grid_min) + " vs " + fmt(want));
    last = row.grid_min;
  }
  c.require(last > 4.84, "F_64 minimum " + fmt(last) + " not above 4.84");
  c.note("F_64 min=" + fmt(last));
  return {5, "comb-minimum", c.pass(), c.summary()};
}

inline CriterionResult c06_comb_structure() {
  Check c;
  for (std::size_t n = 1; n <= 64; ++n) {
    const LemmaCheck lemma = f_n_lemma_check(n, 40, 1e-10);
    c.require(lemma.symmetry, "symmetry fails at n = " + std::to_string(n));
    c.require(lemma.cell_unimodal, "cell shape fails at n = " + std::to_string(n));
    c.require(lemma.minima_ordered, "minima order fails at n = " + std::to_string(n));
  }
  return {6, "comb-structure", c.pass(), c.summary()};
}

inline CriterionResult c07_weak_l1_growth() {
  Check c;
  double prev = -1.0;
  for (std::size_t n : {1, 2, 4, 8, 16, 32, 64}) {
    const GridFunction g = f_n_grid(n, 10001);
    const double wl1 = weak_l1_norm(g);
    const double want = std::log(2.0 * static_cast<double>(n) - 1.0) - 0.01;
    c.require(wl1 >= want, "weak-L1 of F_" + std::to_string(n) + " = " + fmt(wl1) +
                               " below " + fmt(want));
    c.require(wl1 > prev, "weak-L1 not strictly increasing at n = " + std::to_string(n));
    prev = wl1;
  }
  c.note("final=" + fmt(prev));
  return {7, "weak-l1-growth", c.pass(), c.summary()};
}

inline CriterionResult c08_delta_isometry() {
  Check c;
  const SearchBudget budget;
  const std::vector<std::pair<std::string, CoordinateLattice>> spaces = {
      {"l1", CoordinateLattice::weighted_lr(1.0, 3)},
      {"l2", CoordinateLattice::weighted_lr(2.0, 3)},
      {"linf", CoordinateLattice::weighted_lr(std::numeric_limits<double>::infinity(), 3)}};
  for (const auto& [tag, E] : spaces) {
    for (double p : {0.5, 1.0}) {
      Rng rng(derive_seed(1008, "delta-isometry-" + tag, static_cast<std::uint64_t>(p * 2)));
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(3);
        do {
          for (double& v : x) v = rng.uniform(-2.0, 2.0);
        } while (std::fabs(x[0]) + std::fabs(x[1]) + std::fabs(x[2]) < 1e-2);
        const Expr f = Expr::add(
            Expr::scale(x[0], Expr::gen(0)),
            Expr::add(Expr::scale(x[1], Expr::gen(1)), Expr::scale(x[2], Expr::gen(2))));
        const double nx = E.quasi_norm(x);
        const NormBracket b =
            norm_bracket(f, E, p, budget, derive_seed(1008, tag, static_cast<std::uint64_t>(trial)));
        c.require(b.lower <= nx * (1.0 + 1e-9) && nx <= b.upper * (1.0 + 1e-9),
                  tag + " p=" + fmt(p) + ": bracket [" + fmt(b.lower) + ", " + fmt(b.upper) +
                      "] misses ||x|| = " + fmt(nx));
        c.require(b.lower >= 0.99 * nx, tag + " p=" + fmt(p) + ": lower " + fmt(b.lower) +
                                            " below 0.99 ||x|| = " + fmt(0.99 * nx));
        c.require(std::fabs(b.upper - nx) <= 1e-9,
                  tag + " p=" + fmt(p) + ": upper " + fmt(b.upper) + " != ||x|| = " + fmt(nx));
        if (!c.pass()) return {8, "delta-isometry", false, c.summary()};
      }
    }
  }
  return {8, "delta-isometry", c.pass(), c.summary()};
}

inline CriterionResult c09_exact_brackets() {
  Check c;
  const SearchBudget budget;
  {
    const Expr f = Expr::add(Expr::abs(Expr::gen(0)), Expr::abs(Expr::gen(1)));
    const CoordinateLattice E = CoordinateLattice::weighted_lr(1.0, 2);
    const NormBracket b = norm_bracket(f, E, 1.0, budget, 1009);
    c.require(std::fabs(b.lower - 2.0) <= 1e-6 && std::fabs(b.upper - 2.0) <= 1e-6,
              "|d_1| + |d_2| bracket [" + fmt(b.lower) + ", " + fmt(b.upper) + "] != [2, 2]");
  }
  {
    Expr sum = Expr::abs(Expr::gen(0));
    for (int g = 1; g < 8; ++g) sum = Expr::add(sum, Expr::abs(Expr::gen(g)));
    const Expr f = Expr::scale(0.125, sum);
    const CoordinateLattice E = CoordinateLattice::weighted_lr(1.0, 8);
    const NormBracket b = norm_bracket(f, E, 1.0, budget, 1009);
    c.require(std::fabs(b.lower - 1.0) <= 1e-6 && std::fabs(b.upper - 1.0) <= 1e-6,
              "average-of-moduli bracket [" + fmt(b.lower) + ", " + fmt(b.upper) + "] != [1, 1]");
  }
  return {9, "exact-brackets", c.pass(), c.summary()};
}

inline CriterionResult c10_convexity_constants() {
  Check c;
  for (double p : {0.25, 0.5, 1.0}) {
    const CoordinateLattice L = CoordinateLattice::lp_grid(p, 16);
    const ConvexityReport rep = p_convexity_lower_bound(L, p, 200, 1010);
    c.require(std::fabs(rep.bound - 1.0) <= 1e-9,
              "matched-exponent grid bound " + fmt(rep.bound) + " != 1 at p = " + fmt(p));
  }
  {
    const CoordinateLattice L = CoordinateLattice::weighted_lr(0.5, 4);
    std::vector<std::vector<double>> basis;
    for (int j = 0; j < 4; ++j) {
      std::vector<double> e(4, 0.0);
      e[j] = 1.0;
      basis.push_back(std::move(e));
    }
    const double ratio = convexity_ratio(L, basis, 1.0);
    c.require(std::fabs(ratio - 4.0) <= 1e-9, "basis ratio " + fmt(ratio) + " != 4");
    const auto scan = convexity_monotonicity_scan(L, {0.25, 0.5, 0.75, 1.0}, 200, 1010);
    for (std::size_t i = 0; i + 1 < scan.size(); ++i)
      c.require(scan[i].bound <= scan[i + 1].bound + 1e-12,
                "scan not monotone between p = " + fmt(scan[i].exponent) + " and " +
                    fmt(scan[i + 1].exponent));
  }
  return {10, "convexity-constants", c.pass(), c.summary()};
}

inline CriterionResult c11_lp_copy() {
  Check c;
  for (double p : {0.5, 1.0}) {
    const AlphaFamily fam = build_alpha(12, p);  // construction verifies beta o alpha = id
    for (std::size_t n = 0; n < fam.N; ++n) {
      const std::vector<double> coords = beta_eval(fam.exprs[n], fam.N);
      for (std::size_t m = 0; m < fam.N; ++m)
        c.require(coords[m] == (m == n ? 1.0 : 0.0), "beta o alpha != id");
    }
    const DisjointnessReport dis = alpha_disjointness(fam, 10000, 1011);
    c.require(dis.violations == 0, "disjointness violations at p = " + fmt(p) + ": " +
                                       std::to_string(dis.violations));
    const CoordinateLattice E = CoordinateLattice::weighted_lr(p, fam.N);
    for (std::size_t n = 0; n < fam.N; ++n) {
      std::vector<double> en(fam.N, 0.0);
      en[n] = 1.0;
      const double u = fpbl_upper(fam.exprs[n], E, p, {en}, 1000,
                                  derive_seed(1011, "fn-norm", n));
      c.require(std::fabs(u - 1.0) <= 1e-12, "||f_n|| certificate != 1 at n = " + std::to_string(n + 1));
    }
    SearchBudget budget;
    budget.n_max = 12;
    budget.restarts = 12;
    budget.iters = 60;
    Rng rng(derive_seed(1011, "sandwich-coeffs", static_cast<std::uint64_t>(p * 2)));
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> a(fam.N);
      double biggest = 0.0;
      for (double& v : a) {
        v = rng.uniform(-2.0, 2.0);
        biggest = std::max(biggest, std::fabs(v));
      }
      if (biggest < 0.1) a[0] = 1.0;
      const SandwichReport rep =
          alpha_norm_sandwich(fam, a, budget, derive_seed(1011, "sandwich", static_cast<std::uint64_t>(trial)));
      c.require(rep.lower >= rep.target * (1.0 - 1e-9),
                "sandwich lower " + fmt(rep.lower) + " below target " + fmt(rep.target));
      c.require(rep.upper <= rep.target * (1.0 + 1e-9),
                "sandwich upper " + fmt(rep.upper) + " above target " + fmt(rep.target));
      c.require(rep.upper - rep.lower <= 0.05 * rep.upper + 1e-12,
                "bracket gap exceeds 5% at trial " + std::to_string(trial));
      if (!c.pass()) return {11, "lp-copy", false, c.summary()};
    }
    const BallFamilyReport balls = ball_family_check(p, 10000, 1011);
    c.require(balls.intersect_failures == 0,
              "common-ball pairs without intersection at p = " + fmt(p));
    c.require(balls.disjoint_fit_failures == 0,
              "disjoint pair fit inside one ball at p = " + fmt(p));
    c.require(balls.quasi_triangle_failures == 0, "quasi-triangle failures at p = " + fmt(p));
  }
  return {11, "lp-copy", c.pass(), c.summary()};
}

inline CriterionResult c12_property_suites() {
  Check c;
  constexpr std::size_t kCases = 10000;

  {  // quasi-norm p-inequality on random low-exponent lattices
    Rng rng(derive_seed(1012, "p-inequality"));
    const double rs[4] = {0.25, 0.5, 0.75, 1.0};
    for (std::size_t t = 0; t < kCases; ++t) {
      const double r = rs[t % 4];
      const std::size_t d = 2 + rng.below(7);
      std::vector<double> w(d);
      for (double& v : w) v = rng.uniform(0.1, 3.0);
      const CoordinateLattice L(r, w);
      std::vector<double> x(d), y(d), s(d);
      for (std::size_t j = 0; j < d; ++j) {
        x[j] = rng.heavy_tailed();
        y[j] = rng.heavy_tailed();
        s[j] = x[j] + y[j];
      }
      const double lhs = std::pow(L.quasi_norm(s), r);
      const double rhs = std::pow(L.quasi_norm(x), r) + std::pow(L.quasi_norm(y), r);
      if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) {
        c.require(false, "p-inequality violated at case " + std::to_string(t));
        break;
      }
    }
  }

  {  // monotonicity of the quasi-norm
    Rng rng(derive_seed(1012, "monotonicity"));
    const double rs[4] = {0.5, 1.0, 2.0, std::numeric_limits<double>::infinity()};
    for (std::size_t t = 0; t < kCases; ++t) {
      const std::size_t d = 2 + rng.below(7);
      const CoordinateLattice L = CoordinateLattice::weighted_lr(rs[t % 4], d);
      std::vector<double> x(d), y(d);
      for (std::size_t j = 0; j < d; ++j) {
        x[j] = rng.heavy_tailed();
        y[j] = x[j] + (x[j] >= 0.0 ? 1.0 : -1.0) * std::fabs(rng.heavy_tailed());
      }
      const double nx = L.quasi_norm(x), ny = L.quasi_norm(y);
      if (nx > ny * (1.0 + 1e-12) + 1e-12) {
        c.require(false, "monotonicity violated at case " + std::to_string(t));
        break;
      }
    }
  }

  {  // disjointness bound ||x - y|| >= ||x||
    Rng rng(derive_seed(1012, "disjointness"));
    for (std::size_t t = 0; t < kCases; ++t) {
      const std::size_t d = 2 + rng.below(7);
      const double r = 0.25 + 0.25 * static_cast<double>(t % 4);
      const CoordinateLattice L = CoordinateLattice::weighted_lr(r, d);
      std::vector<double> x(d, 0.0), y(d, 0.0);
      for (std::size_t j = 0; j < d; ++j) {
        const double v = std::fabs(rng.heavy_tailed());
        if (rng.next() & 1u)
          x[j] = v;
        else
          y[j] = v;
      }
      if (!disjointness_criterion(L, x, y)) {
        c.require(false, "disjointness criterion rejected a split pair at case " + std::to_string(t));
        break;
      }
      const double lhs = L.quasi_norm(vec_sub(x, y));
      const double nx = L.quasi_norm(x);
      if (lhs < nx - 1e-12 * std::max(1.0, nx)) {
        c.require(false, "disjoint lower bound violated at case " + std::to_string(t));
        break;
      }
    }
  }

  {  // pointwise functional calculus: vector evaluation == coordinatewise
    Rng rng(derive_seed(1012, "pointwise"));
    for (std::size_t t = 0; t < kCases; ++t) {
      const Expr e = random_expr(rng, 4, 4);
      const std::size_t d = 2 + rng.below(5);
      LatticeAssignment a;
      for (int g = 0; g < 4; ++g) {
        std::vector<double> v(d);
        for (double& vv : v) vv = rng.uniform(-2.0, 2.0);
        a[g] = std::move(v);
      }
      const std::vector<double> vec = evaluate_lattice(e, a);
      for (std::size_t j = 0; j < d; ++j) {
        ScalarAssignment slice;
        for (const auto& [g, v] : a) slice[g] = v[j];
        const double want = evaluate_scalar(e, slice);
        if (vec[j] != want) {
          c.require(false, "pointwise evaluation mismatch at case " + std::to_string(t));
          break;
        }
      }
      if (!c.pass()) break;
    }
  }

  {  // positive homogeneity of expressions
    Rng rng(derive_seed(1012, "homogeneity"));
    for (std::size_t t = 0; t < kCases; ++t) {
      const Expr e = random_expr(rng, 4, 4);
      const double lambda = rng.uniform(0.0, 10.0);
      ScalarAssignment a, scaled;
      for (int g = 0; g < 4; ++g) {
        a[g] = rng.uniform(-2.0, 2.0);
        scaled[g] = lambda * a[g];
      }
      const double direct = evaluate_scalar(e, scaled);
      const double routed = lambda * evaluate_scalar(e, a);
      if (std::fabs(direct - routed) >
          1e-12 * std::max({1.0, std::fabs(direct), std::fabs(routed)})) {
        c.require(false, "homogeneity violated at case " + std::to_string(t));
        break;
      }
    }
  }

  return {12, "property-suites", c.pass(), c.summary()};
}

}  // namespace detail

/// Runs the full gate (or the criteria whose name contains `filter`).
/// Criteria with stated wall-clock limits fail when they exceed them.
inline std::vector<CriterionResult> run(const std::string& filter = "", int threads = 1) {
  using clock = std::chrono::steady_clock;
  std::vector<CriterionResult> results;
  auto push = [&](auto&& fn, double time_limit = 0.0) {
    const auto t0 = clock::now();
    CriterionResult r = fn();
    r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (time_limit > 0.0 && r.seconds > time_limit) {
      r.pass = false;
      r.details += (r.details.empty() ? "" : "; ") + std::string("exceeded ") +
                   detail::fmt(time_limit) + " s budget (" + detail::fmt(r.seconds) + " s)";
    }
    results.push_back(r);
  };
  auto want = [&](const char* name) {
    return filter.empty() || std::string(name).find(filter) != std::string::npos;
  };

  if (want("cauchy-half-moment")) push([&] { return detail::c01_cauchy_half_moment(threads); }, 5.0);
  if (want("gaussian-first-moment")) push([&] { return detail::c02_gaussian_first_moment(threads); });
  if (want("small-p-limit")) push([] { return detail::c03_small_p_limit(); });
  if (want("uniform-ratio-scan")) push([] { return detail::c04_uniform_ratio_scan(); });
  if (want("comb-minimum")) push([] { return detail::c05_comb_minimum(); });
  if (want("comb-structure")) push([] { return detail::c06_comb_structure(); });
  if (want("weak-l1-growth")) push([] { return detail::c07_weak_l1_growth(); }, 10.0);
  if (want("delta-isometry")) push([] { return detail::c08_delta_isometry(); });
  if (want("exact-brackets")) push([] { return detail::c09_exact_brackets(); });
  if (want("convexity-constants")) push([] { return detail::c10_convexity_constants(); });
  if (want("lp-copy")) push([] { return detail::c11_lp_copy(); }, 60.0);
  if (want("property-suites")) push([] { return detail::c12_property_suites(); });
  return results;
}

inline bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return !results.empty();
}

}  // namespace freelat::acceptance

#endif  // FREELAT_ACCEPTANCE_HPP
