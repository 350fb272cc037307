#ifndef FREELAT_LATTICE_HPP
#define FREELAT_LATTICE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "freelat/errors.hpp"
#include "freelat/rng.hpp"

namespace freelat {

/// Finite-dimensional function lattice with a weighted r-quasi-norm,
///
///   ||x|| = (sum_j w_j |x_j|^r)^(1/r),   0 < r < inf,   w_j > 0,
///
/// and ||x|| = max_j |x_j| for r = inf. For r >= 1 this is a norm; for
/// r < 1 it is an r-norm, hence a quasi-norm with modulus of concavity
/// 2^(1/r - 1). The order is coordinatewise.
class CoordinateLattice {
public:
  CoordinateLattice(double r, std::vector<double> weights)
      : r_(r), weights_(std::move(weights)) {
    if (!(r_ > 0.0)) throw ParameterError("lattice exponent r must be positive");
    if (weights_.empty()) throw ParameterError("lattice dimension must be >= 1");
    for (double w : weights_)
      if (!(w > 0.0) || !std::isfinite(w))
        throw ParameterError("lattice weights must be positive and finite");
  }

  /// L_p over [0,1] discretized on n equal cells: exponent p, weights 1/n.
  static CoordinateLattice lp_grid(double p, std::size_t n) {
    if (n == 0) throw ParameterError("lp_grid needs at least one cell");
    return CoordinateLattice(p, std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  /// Plain weighted l_r of dimension d (unit weights by default).
  static CoordinateLattice weighted_lr(double r, std::size_t d,
                                       std::vector<double> weights = {}) {
    if (d == 0) throw ParameterError("weighted_lr needs dimension >= 1");
    if (weights.empty()) weights.assign(d, 1.0);
    if (weights.size() != d)
      throw DimensionError("weighted_lr: weight count does not match dimension");
    return CoordinateLattice(r, std::move(weights));
  }

  /// Parses "lpgrid:<p>:<n>" or "weightedlr:<r>:<d>[:w1,...,wd]"; the token
  /// "inf" is accepted as an exponent.
  static CoordinateLattice parse(const std::string& spec);

  std::size_t dim() const { return weights_.size(); }
  double exponent() const { return r_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Modulus of concavity: ||x + y|| <= delta() (||x|| + ||y||).
  double delta() const {
    return std::isinf(r_) || r_ >= 1.0 ? 1.0 : std::pow(2.0, 1.0 / r_ - 1.0);
  }

  double quasi_norm(const std::vector<double>& x) const {
    check_dim(x);
    if (std::isinf(r_)) {
      double m = 0.0;
      for (double v : x) m = std::max(m, std::fabs(v));
      return m;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double a = std::fabs(x[j]);
      if (a > 0.0) acc += weights_[j] * std::pow(a, r_);
    }
    return acc > 0.0 ? std::pow(acc, 1.0 / r_) : 0.0;
  }

  void check_dim(const std::vector<double>& x) const {
    if (x.size() != dim())
      throw DimensionError("vector has dimension " + std::to_string(x.size()) +
                           ", lattice has " + std::to_string(dim()));
  }

private:
  double r_;
  std::vector<double> weights_;
};

inline CoordinateLattice CoordinateLattice::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  auto num = [&](const std::string& s) -> double {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("lattice spec: '" + s + "' is not a number");
    }
  };
  if (parts.size() >= 3 && parts[0] == "lpgrid") {
    if (parts.size() != 3) throw ParseError("lpgrid takes exactly two fields");
    const double n = num(parts[2]);
    if (n < 1 || n != std::floor(n)) throw ParseError("lpgrid cell count must be a positive integer");
    return lp_grid(num(parts[1]), static_cast<std::size_t>(n));
  }
  if (parts.size() >= 3 && parts[0] == "weightedlr") {
    const double d = num(parts[2]);
    if (d < 1 || d != std::floor(d)) throw ParseError("weightedlr dimension must be a positive integer");
    std::vector<double> w;
    if (parts.size() == 4) {
      std::string tok;
      std::istringstream ws(parts[3]);
      while (std::getline(ws, tok, ',')) w.push_back(num(tok));
    } else if (parts.size() != 3) {
      throw ParseError("weightedlr takes two or three fields");
    }
    return weighted_lr(num(parts[1]), static_cast<std::size_t>(d), std::move(w));
  }
  throw ParseError("unknown lattice spec '" + spec + "'");
}

// --- coordinatewise helpers -------------------------------------------------

inline std::vector<double> vec_abs(std::vector<double> x) {
  for (double& v : x) v = std::fabs(v);
  return x;
}

inline std::vector<double> vec_min(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("vec_min: mixed dimensions");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = std::min(x[j], y[j]);
  return out;
}

inline std::vector<double> vec_max(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("vec_max: mixed dimensions");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = std::max(x[j], y[j]);
  return out;
}

inline std::vector<double> vec_sub(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("vec_sub: mixed dimensions");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] - y[j];
  return out;
}

// --- p-convexity ------------------------------------------------------------

/// Result of a randomized search for the p-convexity constant from below.
/// `bound` is the largest ratio
///
///     || (sum_k |x_k|^p)^(1/p) ||  /  (sum_k ||x_k||^p)^(1/p)
///
/// seen over the candidate tuples; `witness` reproduces it exactly.
struct ConvexityReport {
  double exponent = 0.0;
  double bound = 0.0;
  std::vector<std::vector<double>> witness;
  std::size_t trials = 0;
};

/// The ratio above for one concrete tuple. The numerator applies the
/// functional calculus coordinatewise; tuples that are identically zero are
/// rejected.
inline double convexity_ratio(const CoordinateLattice& L,
                              const std::vector<std::vector<double>>& tuple, double p) {
  if (!(p > 0.0) || std::isinf(p)) throw ParameterError("convexity exponent p must be positive and finite");
  if (tuple.empty()) throw ParameterError("convexity ratio needs a nonempty tuple");
  double den_acc = 0.0;
  std::vector<double> mix(L.dim(), 0.0);
  for (const auto& x : tuple) {
    L.check_dim(x);
    const double nx = L.quasi_norm(x);
    if (nx > 0.0) den_acc += std::pow(nx, p);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double a = std::fabs(x[j]);
      if (a > 0.0) mix[j] += std::pow(a, p);
    }
  }
  if (den_acc == 0.0) throw ParameterError("convexity ratio of an all-zero tuple");
  for (double& m : mix) m = m > 0.0 ? std::pow(m, 1.0 / p) : 0.0;
  return L.quasi_norm(mix) / std::pow(den_acc, 1.0 / p);
}

namespace detail {

/// Candidate tuples for the convexity search: the canonical basis tuple and
/// an all-ones singleton first (these realize known extreme ratios), then
/// randomized tuples with heavy-tailed entries.
inline std::vector<std::vector<std::vector<double>>> convexity_pool(
    const CoordinateLattice& L, std::size_t trials, std::uint64_t seed) {
  const std::size_t d = L.dim();
  std::vector<std::vector<std::vector<double>>> pool;
  pool.reserve(trials + 2);

  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> e(d, 0.0);
    e[j] = 1.0;
    basis.push_back(std::move(e));
  }
  pool.push_back(std::move(basis));
  pool.push_back({std::vector<double>(d, 1.0)});

  Rng rng(derive_seed(seed, "convexity-pool"));
  std::vector<std::size_t> sizes = {2, 4, 8, d};
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = std::max<std::size_t>(1, sizes[t % sizes.size()]);
    std::vector<std::vector<double>> tuple(n, std::vector<double>(d, 0.0));
    bool nonzero = false;
    for (auto& x : tuple)
      for (double& v : x) {
        v = rng.heavy_tailed();
        if (v != 0.0) nonzero = true;
      }
    if (!nonzero) tuple[0][0] = 1.0;
    pool.push_back(std::move(tuple));
  }
  return pool;
}

}  // namespace detail

/// Randomized lower bound for the p-convexity constant M^(p)(L). The
/// reported bound is always >= 1 (singleton tuples achieve ratio 1) and the
/// witness tuple recomputes to it via convexity_ratio.
inline ConvexityReport p_convexity_lower_bound(const CoordinateLattice& L, double p,
                                               std::size_t trials, std::uint64_t seed) {
  const auto pool = detail::convexity_pool(L, trials, seed);
  ConvexityReport best;
  best.exponent = p;
  best.trials = trials;
  for (const auto& tuple : pool) {
    const double ratio = convexity_ratio(L, tuple, p);
    if (ratio > best.bound) {
      best.bound = ratio;
      best.witness = tuple;
    }
  }
  return best;
}

/// Lower bounds for a list of exponents, evaluated on one shared tuple pool
/// so the outputs are comparable across p.
inline std::vector<ConvexityReport> convexity_monotonicity_scan(
    const CoordinateLattice& L, const std::vector<double>& p_list, std::size_t trials,
    std::uint64_t seed) {
  if (p_list.empty()) throw ParameterError("scan needs at least one exponent");
  for (std::size_t i = 0; i + 1 < p_list.size(); ++i)
    if (!(p_list[i] < p_list[i + 1]))
      throw ParameterError("scan exponents must be strictly increasing");
  const auto pool = detail::convexity_pool(L, trials, seed);
  std::vector<ConvexityReport> out;
  for (double p : p_list) {
    ConvexityReport best;
    best.exponent = p;
    best.trials = trials;
    for (const auto& tuple : pool) {
      const double ratio = convexity_ratio(L, tuple, p);
      if (ratio > best.bound) {
        best.bound = ratio;
        best.witness = tuple;
      }
    }
    out.push_back(std::move(best));
  }
  return out;
}

// --- L-convexity and p-convexification ---------------------------------------

/// One sampled instance of the L-convexity test: given u >= 0 with
/// ||u|| = 1 and elements x_k in [0, u] whose average dominates (1-eps)u,
/// L-convexity predicts max_k ||x_k|| >= eps. Returns true when this
/// instance VIOLATES that conclusion (premises hold, conclusion fails).
inline bool l_convexity_violation(const CoordinateLattice& L, const std::vector<double>& u,
                                  const std::vector<std::vector<double>>& xs, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw ParameterError("eps must be in (0, 1)");
  L.check_dim(u);
  for (double v : u)
    if (v < 0.0) throw ParameterError("u must be a positive element");
  if (std::fabs(L.quasi_norm(u) - 1.0) > 1e-9)
    throw ParameterError("u must be normalized: ||u|| = 1");
  if (xs.empty()) throw ParameterError("need at least one element x_k");

  std::vector<double> avg(L.dim(), 0.0);
  for (const auto& x : xs) {
    L.check_dim(x);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < -1e-12 || x[j] > u[j] + 1e-12)
        throw ParameterError("x_k must lie in the order interval [0, u]");
      avg[j] += x[j];
    }
  }
  for (double& v : avg) v /= static_cast<double>(xs.size());

  for (std::size_t j = 0; j < avg.size(); ++j)
    if (avg[j] < (1.0 - eps) * u[j]) return false;  // premise fails, no instance

  double max_norm = 0.0;
  for (const auto& x : xs) max_norm = std::max(max_norm, L.quasi_norm(x));
  return max_norm < eps;
}

/// p-convexification sum x (+) y = (x^p + y^p)^(1/p) for positive x, y.
/// Together with ||.||^p this turns an exponent-r space with p <= r into a
/// normed lattice (substituting u = x^p reduces the triangle inequality to
/// Minkowski in exponent r/p >= 1); at p = r the norm is exactly additive.
inline std::vector<double> convexify_oplus(const CoordinateLattice& L,
                                           const std::vector<double>& x,
                                           const std::vector<double>& y, double p) {
  if (!(p > 0.0) || p > 1.0) throw ParameterError("convexification exponent p must be in (0, 1]");
  L.check_dim(x);
  L.check_dim(y);
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0.0 || y[j] < 0.0)
      throw ParameterError("convexify_oplus needs positive lattice elements");
    const double s = std::pow(x[j], p) + std::pow(y[j], p);
    out[j] = s > 0.0 ? std::pow(s, 1.0 / p) : 0.0;
  }
  return out;
}

/// Norm of the p-convexification: ||x||_(p) = ||x||^p.
inline double convexify_norm(const CoordinateLattice& L, const std::vector<double>& x, double p) {
  if (!(p > 0.0) || p > 1.0) throw ParameterError("convexification exponent p must be in (0, 1]");
  return std::pow(L.quasi_norm(x), p);
}

/// True when the positive elements x and y are disjoint (x ∧ y = 0). Both
/// must be >= 0; for disjoint pairs |x - y| = x ∨ y, which forces
/// ||x - y|| >= ||x|| in any lattice quasi-norm.
inline bool disjointness_criterion(const CoordinateLattice& L, const std::vector<double>& x,
                                   const std::vector<double>& y) {
  L.check_dim(x);
  L.check_dim(y);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0.0 || y[j] < 0.0)
      throw ParameterError("disjointness criterion needs positive elements");
    if (std::min(x[j], y[j]) != 0.0) return false;
  }
  return true;
}

}  // namespace freelat

#endif  // FREELAT_LATTICE_HPP
