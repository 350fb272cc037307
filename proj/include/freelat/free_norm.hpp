#ifndef FREELAT_FREE_NORM_HPP
#define FREELAT_FREE_NORM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freelat/errors.hpp"
#include "freelat/expr.hpp"
#include "freelat/lattice.hpp"
#include "freelat/rng.hpp"

// Norm brackets on the free p-convex lattice over a finite-dimensional
// space E. The norm of an expression f in the generators delta_{e_1}, ...,
// delta_{e_d} is
//
//   ||f|| = sup { (sum_i |f(t_i)|^p)^(1/p) :
//                 sup_{x in B_E} sum_i |t_i(x)|^p <= 1 },
//
// where each t_i is a functional on E and f(t) means evaluating the
// expression with generator g assigned t(e_g) = t_g. Lower bounds come from
// explicit admissible tuples; upper bounds come from domination
// certificates |f| <= sum_k |delta_{v_k}|, which give
// ||f|| <= (sum_k ||v_k||^p)^(1/p).
//
// Admissibility (the inner sup over the ball) is the delicate part: for
// p < 1 the objective is not convex, so extreme-point formulas that are
// exact at p = 1 silently undershoot, and an undershot admissibility
// inflates "lower" bounds past the true norm. Everything here either
// computes the sup exactly (single rows, matched ball exponent, rows with
// pairwise disjoint supports, and small sign enumerations at p = 1) or
// returns a certified upper estimate, so normalized tuples always yield
// sound lower bounds.

namespace freelat {

struct FunctionalTuple {
  std::vector<std::vector<double>> rows;

  std::size_t n() const { return rows.size(); }
  std::size_t d() const { return rows.empty() ? 0 : rows[0].size(); }

  void validate(const CoordinateLattice& E) const {
    if (rows.empty()) throw ParameterError("functional tuple is empty");
    for (const auto& r : rows) E.check_dim(r);
  }
};

struct Admissibility {
  double value = 0.0;
  bool exact = false;
  std::string method;
};

namespace detail {

/// ||t||_{E*} = sup { |t(x)| : ||x||_E <= 1 }. For r <= 1 the sup is
/// attained on an extreme ray e_j / w_j^(1/r); for r > 1 it is the usual
/// dual norm after absorbing the weights; the r = inf ball is the cube.
inline double dual_norm(const CoordinateLattice& E, const std::vector<double>& t) {
  const double r = E.exponent();
  const auto& w = E.weights();
  if (std::isinf(r)) {
    double s = 0.0;
    for (double v : t) s += std::fabs(v);
    return s;
  }
  if (r <= 1.0) {
    double m = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j)
      m = std::max(m, std::fabs(t[j]) / std::pow(w[j], 1.0 / r));
    return m;
  }
  const double rc = r / (r - 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double a = std::fabs(t[j]) / std::pow(w[j], 1.0 / r);
    if (a > 0.0) acc += std::pow(a, rc);
  }
  return acc > 0.0 ? std::pow(acc, 1.0 / rc) : 0.0;
}

inline bool rows_disjoint(const FunctionalTuple& t) {
  if (t.n() < 2) return true;
  for (std::size_t j = 0; j < t.d(); ++j) {
    int hits = 0;
    for (const auto& row : t.rows)
      if (row[j] != 0.0 && ++hits > 1) return false;
  }
  return true;
}

/// Exact sup of sum_i |t_i(x)|^p over B_E for rows with pairwise disjoint
/// supports. Splitting ||x||^r across the supports reduces the sup to a
/// one-dimensional allocation problem with per-row gains m_i = ||t_i||_{E*}:
/// concave allocation (p < r) has the Hoelder closed form, linear or convex
/// allocation (p >= r) concentrates on the best row. For the cube every row
/// maximizes independently.
inline double disjoint_admissibility(const CoordinateLattice& E, const FunctionalTuple& t,
                                     double p) {
  const double r = E.exponent();
  std::vector<double> m(t.n());
  for (std::size_t i = 0; i < t.n(); ++i) m[i] = dual_norm(E, t.rows[i]);
  if (std::isinf(r)) {
    double acc = 0.0;
    for (double mi : m)
      if (mi > 0.0) acc += std::pow(mi, p);
    return acc;
  }
  if (p >= r) {
    double best = 0.0;
    for (double mi : m) best = std::max(best, mi);
    return best > 0.0 ? std::pow(best, p) : 0.0;
  }
  const double q = p * r / (r - p);
  double acc = 0.0;
  for (double mi : m)
    if (mi > 0.0) acc += std::pow(mi, q);
  return acc > 0.0 ? std::pow(acc, (r - p) / r) : 0.0;
}

/// Exact sup when the ball exponent matches p: by p-subadditivity the
/// objective is maximized on an extreme ray, giving max_j (sum_i |t_ij|^p)/w_j.
inline double matched_exponent_admissibility(const CoordinateLattice& E,
                                             const FunctionalTuple& t, double p) {
  const auto& w = E.weights();
  double best = 0.0;
  for (std::size_t j = 0; j < t.d(); ++j) {
    double c = 0.0;
    for (const auto& row : t.rows) {
      const double a = std::fabs(row[j]);
      if (a > 0.0) c += std::pow(a, p);
    }
    best = std::max(best, c / w[j]);
  }
  return best;
}

}  // namespace detail

/// sup_{x in B_E} sum_i |t_i(x)|^p for p in (0, 1]. The result is exact on
/// the documented families; otherwise it is a certified upper estimate
/// (never an underestimate), with `exact = false` and the method named.
inline Admissibility admissibility(const FunctionalTuple& t, const CoordinateLattice& E,
                                   double p) {
  if (!(p > 0.0) || p > 1.0) throw ParameterError("admissibility exponent p must be in (0, 1]");
  t.validate(E);
  const double r = E.exponent();

  bool all_zero = true;
  for (const auto& row : t.rows)
    for (double v : row)
      if (v != 0.0) all_zero = false;
  if (all_zero) return {0.0, true, "zero"};

  if (t.n() == 1)
    return {std::pow(detail::dual_norm(E, t.rows[0]), p), true, "dual-norm"};
  if (r == p)
    return {detail::matched_exponent_admissibility(E, t, p), true, "matched-exponent"};
  if (detail::rows_disjoint(t))
    return {detail::disjoint_admissibility(E, t, p), true, "disjoint-supports"};

  if (p == 1.0) {
    if (std::isinf(r) && t.d() <= 20) {
      // Convex objective on the cube: enumerate the 2^(d-1) sign vertices.
      double best = 0.0;
      const std::size_t d = t.d();
      for (std::uint64_t mask = 0; mask < (1ULL << (d - 1)); ++mask) {
        double s = 0.0;
        for (const auto& row : t.rows) {
          double dot = row[0];
          for (std::size_t j = 1; j < d; ++j)
            dot += ((mask >> (j - 1)) & 1u) ? -row[j] : row[j];
          s += std::fabs(dot);
        }
        best = std::max(best, s);
      }
      return {best, true, "cube-vertices"};
    }
    if (r == 2.0 && t.n() <= 20) {
      // sum_i |t_i(x)| = max over signs of <sum eps_i t_i, x>; the sup over
      // the (weight-absorbed) Euclidean ball is the largest such norm.
      const std::size_t n = t.n(), d = t.d();
      const auto& w = E.weights();
      double best = 0.0;
      for (std::uint64_t mask = 0; mask < (1ULL << (n - 1)); ++mask) {
        double ss = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          double comb = t.rows[0][j];
          for (std::size_t i = 1; i < n; ++i)
            comb += ((mask >> (i - 1)) & 1u) ? -t.rows[i][j] : t.rows[i][j];
          ss += comb * comb / w[j];
        }
        best = std::max(best, std::sqrt(ss));
      }
      return {best, true, "zonotope"};
    }
  }

  // Certified upper estimate: the crude per-row bound and, via
  // p-subadditivity, the exact maximum of sum_j c_j |x_j|^p over the ball.
  double crude = 0.0;
  for (const auto& row : t.rows) crude += std::pow(detail::dual_norm(E, row), p);

  std::vector<double> c(t.d(), 0.0);
  for (std::size_t j = 0; j < t.d(); ++j)
    for (const auto& row : t.rows) {
      const double a = std::fabs(row[j]);
      if (a > 0.0) c[j] += std::pow(a, p);
    }
  double refined;
  if (std::isinf(r)) {
    refined = 0.0;
    for (double cj : c) refined += cj;
  } else {
    const auto& w = E.weights();
    if (p >= r) {
      refined = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j)
        refined = std::max(refined, c[j] / std::pow(w[j], p / r));
    } else {
      double acc = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) {
        const double b = c[j] / std::pow(w[j], p / r);
        if (b > 0.0) acc += std::pow(b, r / (r - p));
      }
      refined = acc > 0.0 ? std::pow(acc, (r - p) / r) : 0.0;
    }
  }
  return {std::min(crude, refined), false, "upper-estimate"};
}

// --- lower bounds -----------------------------------------------------------

struct SearchBudget {
  int n_max = 8;
  int restarts = 64;
  int iters = 200;
};

struct LowerBound {
  double value = 0.0;
  FunctionalTuple certificate;  // normalized: admissibility <= 1
};

namespace detail {

inline ScalarAssignment row_assignment(const std::vector<double>& row) {
  ScalarAssignment a;
  for (std::size_t g = 0; g < row.size(); ++g) a[static_cast<int>(g)] = row[g];
  return a;
}

inline double eval_at_row(const Expr& f, const std::vector<double>& row) {
  return evaluate_scalar(f, row_assignment(row));
}

/// (sum_i |f(t_i)|^p)^(1/p), no normalization.
inline double raw_objective(const Expr& f, const FunctionalTuple& t, double p) {
  double acc = 0.0;
  for (const auto& row : t.rows) {
    const double v = std::fabs(eval_at_row(f, row));
    if (v > 0.0) acc += std::pow(v, p);
  }
  return acc > 0.0 ? std::pow(acc, 1.0 / p) : 0.0;
}

/// Normalized certificate value of a tuple; 0 for the zero tuple. Sound for
/// any admissibility path because non-exact paths only overestimate.
inline double normalized_value(const Expr& f, const FunctionalTuple& t,
                               const CoordinateLattice& E, double p) {
  const Admissibility a = admissibility(t, E, p);
  if (a.value <= 0.0) return 0.0;
  return raw_objective(f, t, p) / std::pow(a.value, 1.0 / p);
}

/// Hill climb over the free entries of a tuple, re-normalizing through the
/// supplied value function each probe. Only entries listed in `slots` move,
/// which lets disjoint-support tuples keep their support pattern.
template <typename ValueFn>
double coordinate_ascent(FunctionalTuple& t, const std::vector<std::pair<std::size_t, std::size_t>>& slots,
                         ValueFn value, int iters) {
  double best = value(t);
  double step = 0.5;
  for (int it = 0; it < iters && step > 1e-8; ++it) {
    bool improved = false;
    for (const auto& [i, j] : slots) {
      const double save = t.rows[i][j];
      const double mag = std::fabs(save) + 1.0;
      for (const double dir : {1.0, -1.0}) {
        t.rows[i][j] = save + dir * step * mag;
        const double v = value(t);
        if (v > best * (1.0 + 1e-12)) {
          best = v;
          improved = true;
          break;
        }
        t.rows[i][j] = save;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

inline std::vector<std::pair<std::size_t, std::size_t>> all_slots(const FunctionalTuple& t) {
  std::vector<std::pair<std::size_t, std::size_t>> s;
  for (std::size_t i = 0; i < t.n(); ++i)
    for (std::size_t j = 0; j < t.d(); ++j) s.emplace_back(i, j);
  return s;
}

inline std::vector<std::pair<std::size_t, std::size_t>> support_slots(const FunctionalTuple& t) {
  std::vector<std::pair<std::size_t, std::size_t>> s;
  for (std::size_t i = 0; i < t.n(); ++i)
    for (std::size_t j = 0; j < t.d(); ++j)
      if (t.rows[i][j] != 0.0) s.emplace_back(i, j);
  return s;
}

}  // namespace detail

/// Best lower bound for ||f|| found within the budget, with the admissible
/// tuple that certifies it. Deterministic for a fixed (budget, seed).
///
/// Search families are chosen so their admissibility is computed exactly:
/// the coordinate-functional tuple, single functionals (sign patterns, basis
/// vectors, and hill-climbed random starts), tuples with disjoint supports,
/// and for p = 1 on an l_1-ball lattice general hill-climbed tuples.
inline LowerBound fbl_lower(const Expr& f, const CoordinateLattice& E, double p,
                            const SearchBudget& budget, std::uint64_t seed) {
  if (!(p > 0.0) || p > 1.0) throw ParameterError("free-norm exponent p must be in (0, 1]");
  if (budget.n_max < 1 || budget.restarts < 1 || budget.iters < 1)
    throw ParameterError("search budget must be positive");
  const std::size_t d = E.dim();
  for (int g : f.generators())
    if (g >= static_cast<int>(d))
      throw DimensionError("expression uses generator " + std::to_string(g) +
                           " outside the space dimension " + std::to_string(d));

  {
    // Positive homogeneity spot check; everything constructible through Expr
    // passes, so a failure means a corrupted tree.
    Rng probe_rng(derive_seed(seed, "fbl-homogeneity"));
    for (int k = 0; k < 3; ++k) {
      std::vector<double> t(d);
      for (double& v : t) v = probe_rng.uniform(-1.0, 1.0);
      const double one = detail::eval_at_row(f, t);
      for (double& v : t) v *= 2.0;
      const double two = detail::eval_at_row(f, t);
      if (std::fabs(two - 2.0 * one) > 1e-9 * (1.0 + std::fabs(two) + std::fabs(one)))
        throw ContractError("expression is not positively homogeneous of degree 1");
    }
  }

  LowerBound best;
  auto consider = [&](const FunctionalTuple& t) {
    const double v = detail::normalized_value(f, t, E, p);
    if (v > best.value) {
      best.value = v;
      best.certificate = t;
    }
  };

  // Structured candidates.
  {
    FunctionalTuple coord;
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> e(d, 0.0);
      e[j] = 1.0;
      coord.rows.push_back(std::move(e));
    }
    consider(coord);
    for (std::size_t j = 0; j < d; ++j) {
      FunctionalTuple single{{std::vector<double>(d, 0.0)}};
      single.rows[0][j] = 1.0;
      consider(single);
      single.rows[0][j] = -1.0;
      consider(single);
    }
    FunctionalTuple ones{{std::vector<double>(d, 1.0)}};
    consider(ones);
    if (d <= 10) {
      for (std::uint64_t mask = 0; mask < (1ULL << (d - 1)); ++mask) {
        FunctionalTuple t{{std::vector<double>(d, 1.0)}};
        for (std::size_t j = 1; j < d; ++j)
          if ((mask >> (j - 1)) & 1u) t.rows[0][j] = -1.0;
        consider(t);
      }
    }
  }

  auto value_fn = [&](const FunctionalTuple& t) {
    return detail::normalized_value(f, t, E, p);
  };

  for (int restart = 0; restart < budget.restarts; ++restart) {
    Rng rng(derive_seed(seed, "fbl-restart", static_cast<std::uint64_t>(restart)));
    const bool can_multi = budget.n_max >= 2 && d >= 2;
    // General (non-disjoint) random tuples only where their admissibility is
    // exact for arbitrary rows: p = 1 over an l_1-type ball.
    const bool can_general = can_multi && p == 1.0 && E.exponent() == 1.0;
    const int family = can_multi ? restart % 3 : 0;
    FunctionalTuple t;
    if (family == 0) {
      t.rows = {std::vector<double>(d, 0.0)};
      for (double& v : t.rows[0]) v = rng.heavy_tailed();
      detail::coordinate_ascent(t, detail::all_slots(t), value_fn, budget.iters);
    } else if (family == 1 || !can_general) {
      // Disjoint supports: deal shuffled coordinates round-robin into n
      // rows, then climb without leaving the support pattern.
      const std::uint64_t n_cap = std::min<std::uint64_t>(
          static_cast<std::uint64_t>(budget.n_max), static_cast<std::uint64_t>(d));
      const std::size_t n = static_cast<std::size_t>(2 + rng.below(n_cap - 1));
      std::vector<std::size_t> perm(d);
      for (std::size_t j = 0; j < d; ++j) perm[j] = j;
      for (std::size_t j = d; j > 1; --j)
        std::swap(perm[j - 1], perm[rng.below(j)]);
      t.rows.assign(n, std::vector<double>(d, 0.0));
      for (std::size_t j = 0; j < d; ++j)
        t.rows[j % n][perm[j]] = rng.heavy_tailed();
      detail::coordinate_ascent(t, detail::support_slots(t), value_fn, budget.iters);
    } else {
      const std::size_t n = static_cast<std::size_t>(
          2 + rng.below(static_cast<std::uint64_t>(budget.n_max) - 1));
      t.rows.assign(n, std::vector<double>(d, 0.0));
      for (auto& row : t.rows)
        for (double& v : row) v = rng.heavy_tailed();
      detail::coordinate_ascent(t, detail::all_slots(t), value_fn, budget.iters);
    }
    consider(t);
  }

  if (best.value > 0.0) {
    const double s = admissibility(best.certificate, E, p).value;
    const double scale = std::pow(s, -1.0 / p);
    for (auto& row : best.certificate.rows)
      for (double& v : row) v *= scale;
    best.value = detail::raw_objective(f, best.certificate, p);
  }
  return best;
}

// --- upper bounds -----------------------------------------------------------

/// Value of the domination certificate |f| <= sum_k |delta_{v_k}|, namely
/// (sum_k ||v_k||_E^p)^(1/p), after spot-checking the domination at
/// structured and random probe functionals. A failing probe throws
/// CertificateError carrying the witness functional.
inline double fpbl_upper(const Expr& f, const CoordinateLattice& E, double p,
                         const std::vector<std::vector<double>>& certificate,
                         int check_points, std::uint64_t seed) {
  if (!(p > 0.0) || p > 1.0) throw ParameterError("free-norm exponent p must be in (0, 1]");
  if (certificate.empty()) throw ParameterError("certificate is empty");
  for (const auto& v : certificate) E.check_dim(v);
  const std::size_t d = E.dim();
  for (int g : f.generators())
    if (g >= static_cast<int>(d))
      throw DimensionError("expression uses generator outside the space dimension");

  auto dominated = [&](const std::vector<double>& t) {
    double bound = 0.0;
    for (const auto& v : certificate) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += t[j] * v[j];
      bound += std::fabs(dot);
    }
    const double val = std::fabs(detail::eval_at_row(f, t));
    if (val > bound + 1e-9 * std::max(1.0, bound))
      throw CertificateError("domination |f| <= sum_k |delta_{v_k}| fails at a probe functional", t);
  };

  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> t(d, 0.0);
    t[j] = 1.0;
    dominated(t);
    t[j] = -1.0;
    dominated(t);
  }
  if (d <= 10) {
    for (std::uint64_t mask = 0; mask < (1ULL << (d - 1)); ++mask) {
      std::vector<double> t(d, 1.0);
      for (std::size_t j = 1; j < d; ++j)
        if ((mask >> (j - 1)) & 1u) t[j] = -1.0;
      dominated(t);
    }
  }
  Rng rng(derive_seed(seed, "fpbl-probes"));
  for (int k = 0; k < check_points; ++k) {
    std::vector<double> t(d);
    for (double& v : t) v = rng.heavy_tailed();
    dominated(t);
  }

  double acc = 0.0;
  for (const auto& v : certificate) {
    const double nv = E.quasi_norm(v);
    if (nv > 0.0) acc += std::pow(nv, p);
  }
  return acc > 0.0 ? std::pow(acc, 1.0 / p) : 0.0;
}

/// Domination weights by structural induction: coefficients W_g with
/// |f(t)| <= sum_g W_g |t_g| for every functional t. They provide the
/// always-valid fallback certificate { W_g e_g }.
inline std::map<int, double> domination_weights(const Expr& f) {
  const Expr::Node& n = f.node();
  switch (n.kind) {
    case Expr::Kind::Generator:
      return {{n.index, 1.0}};
    case Expr::Kind::Scale: {
      auto w = domination_weights(n.args[0]);
      for (auto& [g, c] : w) c *= std::fabs(n.scalar);
      return w;
    }
    case Expr::Kind::Add: {
      auto w = domination_weights(n.args[0]);
      for (const auto& [g, c] : domination_weights(n.args[1])) w[g] += c;
      return w;
    }
    case Expr::Kind::Sup:
    case Expr::Kind::Inf: {
      auto w = domination_weights(n.args[0]);
      for (const auto& [g, c] : domination_weights(n.args[1]))
        w[g] = std::max(w[g], c);
      return w;
    }
    case Expr::Kind::Abs:
    case Expr::Kind::Pos:
      return domination_weights(n.args[0]);
    case Expr::Kind::PowerSum: {
      std::map<int, double> w;
      for (const Expr& c : n.args)
        for (const auto& [g, cv] : domination_weights(c)) w[g] += cv;
      if (n.scalar < 1.0) {
        const double factor =
            std::pow(static_cast<double>(n.args.size()), 1.0 / n.scalar - 1.0);
        for (auto& [g, cv] : w) cv *= factor;
      }
      return w;
    }
  }
  throw Error("corrupt expression node");
}

// --- the bracket ------------------------------------------------------------

struct NormBracket {
  double lower = 0.0;
  double upper = 0.0;
  FunctionalTuple lower_certificate;
  std::vector<std::vector<double>> upper_certificate;
  double p = 0.0;
  std::vector<std::string> notes;
};

/// Two-sided bracket for ||f||. Upper candidates: the exact linear
/// certificate when f is a plain linear combination (f = delta_v), the
/// domination-weight certificate, and any user-supplied certificates; the
/// best probe-surviving one wins. The bracket invariant lower <= upper is
/// enforced.
inline NormBracket norm_bracket(const Expr& f, const CoordinateLattice& E, double p,
                                const SearchBudget& budget, std::uint64_t seed,
                                const std::vector<std::vector<std::vector<double>>>& user_certs = {}) {
  NormBracket out;
  out.p = p;
  const LowerBound lb = fbl_lower(f, E, p, budget, seed);
  out.lower = lb.value;
  out.lower_certificate = lb.certificate;

  std::vector<std::pair<std::string, std::vector<std::vector<double>>>> candidates;
  if (f.is_linear()) {
    std::vector<double> v(E.dim(), 0.0);
    for (std::size_t j = 0; j < E.dim(); ++j) {
      std::vector<double> coord(E.dim(), 0.0);
      coord[j] = 1.0;
      v[j] = detail::eval_at_row(f, coord);
    }
    candidates.emplace_back("linear", std::vector<std::vector<double>>{v});
  }
  {
    std::vector<std::vector<double>> cert;
    for (const auto& [g, c] : domination_weights(f)) {
      if (c == 0.0) continue;
      std::vector<double> v(E.dim(), 0.0);
      v[static_cast<std::size_t>(g)] = c;
      cert.push_back(std::move(v));
    }
    if (!cert.empty()) candidates.emplace_back("domination-weights", std::move(cert));
  }
  for (const auto& cert : user_certs) candidates.emplace_back("user", cert);

  bool have_upper = false;
  std::uint64_t cert_index = 0;
  for (const auto& [name, cert] : candidates) {
    ++cert_index;
    try {
      const double u = fpbl_upper(f, E, p, cert, 256, derive_seed(seed, "bracket-cert", cert_index));
      if (!have_upper || u < out.upper) {
        out.upper = u;
        out.upper_certificate = cert;
        out.notes.push_back("upper certificate: " + name);
        have_upper = true;
      }
    } catch (const CertificateError&) {
      out.notes.push_back("certificate rejected: " + name);
    }
  }
  if (!have_upper)
    throw PropertyError("no domination certificate survived probing");
  if (out.lower > out.upper + 1e-9)
    throw PropertyError("bracket inversion: lower bound exceeds upper bound");
  return out;
}

}  // namespace freelat

#endif  // FREELAT_FREE_NORM_HPP
