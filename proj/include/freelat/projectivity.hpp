#ifndef FREELAT_PROJECTIVITY_HPP
#define FREELAT_PROJECTIVITY_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "freelat/errors.hpp"
#include "freelat/expr.hpp"
#include "freelat/free_norm.hpp"
#include "freelat/lattice.hpp"
#include "freelat/rng.hpp"

// The complemented-copy construction that witnesses projectivity of l_p:
// inside the free lattice on N generators, the elements
//
//   f_n = [ |d_n| - 4^n ( sum_{j<n} |d_j| + sum_{j>n} 2^{-j} |d_j| ) ]_+
//
// (d_j = delta over the j-th basis vector, truncating the tail at N) are
// pairwise disjoint, each has norm 1 certified by |f_n| <= |d_n|, and
// n -> f_n spans an isometric copy of l_p: evaluating at the coordinate
// functionals recovers coefficients (beta o alpha = id), and
// || sum a_n f_n || = (sum |a_n|^p)^{1/p} from both sides.

namespace freelat {

struct AlphaFamily {
  std::size_t N = 0;
  double p = 1.0;
  std::vector<Expr> exprs;  // exprs[n] is f_{n+1} in the display above
};

/// Coordinates of f under the coordinate functionals e_0*, ..., e_{N-1}*.
inline std::vector<double> beta_eval(const Expr& f, std::size_t N) {
  std::vector<double> out(N);
  ScalarAssignment a;
  for (std::size_t j = 0; j < N; ++j) a[static_cast<int>(j)] = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    a[static_cast<int>(j)] = 1.0;
    out[j] = evaluate_scalar(f, a);
    a[static_cast<int>(j)] = 0.0;
  }
  return out;
}

/// Builds the family and verifies beta(f_n) = e_n exactly. The penalty
/// weights 4^n and 2^{-j} are exact binary powers, so the coordinate
/// evaluations come out as exact 0.0 / 1.0 and the verification is strict.
inline AlphaFamily build_alpha(std::size_t N, double p) {
  if (N == 0) throw ParameterError("family size N must be >= 1");
  if (!(p > 0.0) || p > 1.0) throw ParameterError("exponent p must be in (0, 1]");
  if (N > 30) throw ParameterError("4^n weights overflow sensible ranges past N = 30");

  AlphaFamily fam;
  fam.N = N;
  fam.p = p;
  for (std::size_t n = 1; n <= N; ++n) {
    std::vector<Expr> penalty;
    for (std::size_t j = 1; j < n; ++j)
      penalty.push_back(Expr::abs(Expr::gen(static_cast<int>(j - 1))));
    for (std::size_t j = n + 1; j <= N; ++j)
      penalty.push_back(Expr::scale(std::exp2(-static_cast<double>(j)),
                                    Expr::abs(Expr::gen(static_cast<int>(j - 1)))));
    const Expr head = Expr::abs(Expr::gen(static_cast<int>(n - 1)));
    if (penalty.empty()) {
      fam.exprs.push_back(head);
    } else {
      Expr sum = penalty[0];
      for (std::size_t i = 1; i < penalty.size(); ++i)
        sum = Expr::add(sum, penalty[i]);
      fam.exprs.push_back(Expr::pos(
          Expr::sub(head, Expr::scale(std::exp2(2.0 * static_cast<double>(n)), sum))));
    }
  }

  for (std::size_t n = 0; n < N; ++n) {
    const std::vector<double> coords = beta_eval(fam.exprs[n], N);
    for (std::size_t m = 0; m < N; ++m) {
      const double want = (m == n) ? 1.0 : 0.0;
      if (coords[m] != want)
        throw PropertyError("alpha family failed the coordinate identity beta(f_n) = e_n");
    }
  }
  return fam;
}

/// Randomized disjointness audit: at heavy-tailed functionals all pairs
/// n != m must satisfy min(f_n, f_m) = 0 (the positive part clips one of
/// them to exactly zero whenever the other is positive).
struct DisjointnessReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_pair_min = 0.0;
};

inline DisjointnessReport alpha_disjointness(const AlphaFamily& fam, std::size_t trials,
                                             std::uint64_t seed, double tol = 1e-12) {
  DisjointnessReport rep;
  rep.trials = trials;
  Rng rng(derive_seed(seed, "alpha-disjointness"));
  std::vector<double> vals(fam.N);
  ScalarAssignment a;
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t j = 0; j < fam.N; ++j) a[static_cast<int>(j)] = rng.heavy_tailed();
    for (std::size_t n = 0; n < fam.N; ++n) vals[n] = evaluate_scalar(fam.exprs[n], a);
    for (std::size_t n = 0; n < fam.N; ++n)
      for (std::size_t m = n + 1; m < fam.N; ++m) {
        const double pair_min = std::min(vals[n], vals[m]);
        rep.worst_pair_min = std::max(rep.worst_pair_min, pair_min);
        if (pair_min > tol) ++rep.violations;
      }
  }
  return rep;
}

/// Norm sandwich for F = sum a_n f_n over the l_p^N ball:
/// the coordinate-functional tuple certifies (sum |a_n|^p)^{1/p} from below
/// and the certificate { |a_n| e_n } gives the same value from above.
struct SandwichReport {
  double target = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

inline SandwichReport alpha_norm_sandwich(const AlphaFamily& fam, const std::vector<double>& a,
                                          const SearchBudget& budget, std::uint64_t seed) {
  if (a.size() != fam.N) throw DimensionError("coefficient count must match the family size");
  bool any = false;
  for (double c : a)
    if (c != 0.0) any = true;
  if (!any) throw ParameterError("coefficient vector is zero");

  Expr F = Expr::scale(a[0], fam.exprs[0]);
  for (std::size_t n = 1; n < fam.N; ++n)
    F = Expr::add(F, Expr::scale(a[n], fam.exprs[n]));

  const CoordinateLattice E = CoordinateLattice::weighted_lr(fam.p, fam.N);

  SandwichReport rep;
  double acc = 0.0;
  for (double c : a)
    if (c != 0.0) acc += std::pow(std::fabs(c), fam.p);
  rep.target = std::pow(acc, 1.0 / fam.p);

  rep.lower = fbl_lower(F, E, fam.p, budget, seed).value;

  std::vector<std::vector<double>> cert;
  for (std::size_t n = 0; n < fam.N; ++n) {
    if (a[n] == 0.0) continue;
    std::vector<double> v(fam.N, 0.0);
    v[n] = std::fabs(a[n]);
    cert.push_back(std::move(v));
  }
  rep.upper = fpbl_upper(F, E, fam.p, cert, 512, derive_seed(seed, "sandwich-cert"));
  return rep;
}

/// Ball-family geometry on an L_p grid: points of a common ball
/// B(b, ||b||/4^n) must intersect (x ∧ y != 0), and a disjoint positive
/// pair never fits in one ball. Membership uses the quasi-norm value
/// d(x, y) = ||x - y||; the no-disjoint-pair conclusion is a theorem for
/// p >= 1/2 and is reported (not asserted) below that.
struct BallFamilyReport {
  std::size_t trials = 0;
  std::size_t intersect_failures = 0;    // in-ball pairs with x ∧ y = 0
  std::size_t disjoint_fit_failures = 0; // disjoint pairs inside one ball
  std::size_t quasi_triangle_failures = 0;
};

inline BallFamilyReport ball_family_check(double p, std::size_t trials, std::uint64_t seed,
                                          std::size_t dim = 32) {
  if (!(p > 0.0) || p > 1.0) throw ParameterError("exponent p must be in (0, 1]");
  if (dim < 2) throw ParameterError("need dimension >= 2");
  const CoordinateLattice L = CoordinateLattice::lp_grid(p, dim);
  const double delta = L.delta();

  BallFamilyReport rep;
  rep.trials = trials;
  Rng rng(derive_seed(seed, "ball-family"));

  std::vector<double> b(dim), u(dim), x(dim), y(dim), xs(dim), ys(dim);
  auto draw_in_ball = [&](const std::vector<double>& center, double radius,
                          std::vector<double>& out) {
    for (std::size_t j = 0; j < dim; ++j) u[j] = rng.heavy_tailed();
    const double nu = L.quasi_norm(u);
    const double scale = nu > 0.0 ? radius * rng.uniform01() / nu : 0.0;
    for (std::size_t j = 0; j < dim; ++j)
      out[j] = std::max(center[j] + scale * u[j], 0.0);
  };

  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t level = 1 + t % 3;
    for (std::size_t j = 0; j < dim; ++j) b[j] = std::fabs(rng.heavy_tailed()) + 1e-3;
    const double radius = L.quasi_norm(b) / std::pow(4.0, static_cast<double>(level));

    draw_in_ball(b, radius, x);
    draw_in_ball(b, radius, y);

    // clipping to the positive cone only shrinks distances, so both stay in
    // the ball; they must share support
    bool intersect = false;
    for (std::size_t j = 0; j < dim; ++j)
      if (std::min(x[j], y[j]) > 0.0) intersect = true;
    if (!intersect) ++rep.intersect_failures;

    // split x and y across a random support mask: a disjoint positive pair
    // that tries hard to stay near b, yet can never fit in the same ball
    for (std::size_t j = 0; j < dim; ++j) {
      const bool left = rng.next() & 1u;
      xs[j] = left ? x[j] : 0.0;
      ys[j] = left ? 0.0 : y[j];
    }
    if (L.quasi_norm(vec_sub(xs, b)) < radius && L.quasi_norm(vec_sub(ys, b)) < radius)
      ++rep.disjoint_fit_failures;

    const double dxy = L.quasi_norm(vec_sub(x, y));
    const double dxb = L.quasi_norm(vec_sub(x, b));
    const double dyb = L.quasi_norm(vec_sub(y, b));
    if (dxy > delta * (dxb + dyb) * (1.0 + 1e-12)) ++rep.quasi_triangle_failures;
  }
  return rep;
}

}  // namespace freelat

#endif  // FREELAT_PROJECTIVITY_HPP
