#ifndef FREELAT_STABLE_HPP
#define FREELAT_STABLE_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "freelat/errors.hpp"
#include "freelat/rng.hpp"

// Moment constants of symmetric q-stable laws (characteristic function
// e^{-|t|^q}) and the derived uniform bounds. The central object is
//
//   A_{p,q} = (E|X|^p)^{1/p}
//           = [ 2 Gamma(p) Gamma(1 - p/q) / (Gamma(p/2) Gamma(1 - p/2)) ]^{1/p}
//
// for 0 < p < q, finite exactly when p < q, with the limit
// A_{p,q} -> e^{gamma (1/q - 1)} as p -> 0+. Everything is evaluated in log
// space so that the p -> 0 and p -> q edges stay finite.

namespace freelat {

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286;

/// log Gamma(x) for x > 0 via a 15-term Lanczos approximation
/// (g = 607/128). Good to ~1e-15 relative over the range used here;
/// double-checked against independent routes in the test suite.
inline double log_gamma(double x) {
  static const double cof[14] = {
      57.1562356658629235,     -59.5979603554754912,
      14.1360979747417471,     -0.491913816097620199,
      0.339946499848118887e-4, 0.465236289270485756e-4,
      -0.983744753048795646e-4, 0.158088703224912494e-3,
      -0.210264441724104883e-3, 0.217439618115212643e-3,
      -0.164318106536763890e-3, 0.844182239838527433e-4,
      -0.261908384015814087e-4, 0.368991826595316234e-5};
  if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
  double y = x;
  double tmp = x + 5.24218750000000000;  // x + g + 1/2, g = 607/128
  tmp = (x + 0.5) * std::log(tmp) - tmp;
  double ser = 0.999999999999997092;
  for (double c : cof) ser += c / ++y;
  return tmp + std::log(2.5066282746310005 * ser / x);
}

namespace detail {

inline void check_pq(double p, double q) {
  if (!(p > 0.0)) throw ParameterError("p must be positive");
  if (!(q > 0.0) || q > 2.0)
    throw DomainError("q must lie in (0, 2]; no stable law exists beyond the Gaussian");
  if (p >= q)
    throw DomainError("p must be < q: the p-th stable moment diverges otherwise");
  if (p >= 2.0) throw DomainError("p must be below 2");
}

}  // namespace detail

/// A_{p,q} for 0 < p < q <= 2. The Gamma-quotient formula is evaluated in
/// log space; q = 2 (the Gaussian endpoint, where Gamma(1 - p/q) cancels
/// against nothing and the law is N(0, 2)) is accepted as well.
inline double a_pq(double p, double q) {
  detail::check_pq(p, q);
  const double log_val = std::log(2.0) + log_gamma(p) + log_gamma(1.0 - p / q) -
                         log_gamma(p / 2.0) - log_gamma(1.0 - p / 2.0);
  return std::exp(log_val / p);
}

/// lim_{p -> 0+} A_{p,q} = e^{gamma (1/q - 1)}.
inline double a_pq_limit(double q) {
  if (!(q > 0.0) || q > 2.0) throw DomainError("q must lie in (0, 2]");
  return std::exp(kEulerGamma * (1.0 / q - 1.0));
}

// --- sampling ---------------------------------------------------------------

struct StableSpec {
  double q = 1.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

namespace detail {

/// One standard symmetric q-stable variate (Chambers-Mallows-Stuck).
/// q = 1 short-circuits to the Cauchy tangent transform.
inline double stable_variate(double q, Rng& rng) {
  const double u = 3.14159265358979323846 * (rng.uniform_open() - 0.5);
  if (q == 1.0) return std::tan(u);
  const double w = rng.exponential();
  const double su = std::sin(q * u);
  const double cu = std::cos(u);
  const double c2 = std::cos((1.0 - q) * u);
  return su / std::pow(cu, 1.0 / q) * std::pow(c2 / w, (1.0 - q) / q);
}

}  // namespace detail

/// Draws n samples of the standard symmetric q-stable law. Deterministic
/// for a fixed spec, independent of how the caller threads anything.
inline std::vector<double> sample_stable(const StableSpec& spec) {
  if (!(spec.q > 0.0) || spec.q > 2.0) throw DomainError("stable index q must lie in (0, 2]");
  if (spec.n == 0) throw ParameterError("sample count must be positive");
  std::vector<double> out(spec.n);
  constexpr std::size_t kChunk = 1 << 16;
  for (std::size_t c = 0; c * kChunk < spec.n; ++c) {
    Rng rng(derive_seed(spec.seed, "stable-chunk", c));
    const std::size_t hi = std::min(spec.n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < hi; ++i)
      out[i] = detail::stable_variate(spec.q, rng);
  }
  return out;
}

struct MonteCarloEstimate {
  double estimate = 0.0;   // (mean of |X|^p)^(1/p)
  double stderr_ = 0.0;    // delta-method standard error of `estimate`
  double raw_moment = 0.0; // mean of |X|^p
  std::size_t n = 0;
  bool variance_finite = true;  // |X|^p has finite variance iff 2p < q
};

/// Monte Carlo check of A_{p,q}: samples the q-stable law in fixed-size
/// chunks (each with its own derived seed, so the estimate is identical for
/// any thread count) and propagates the standard error of the p-th moment
/// through the 1/p power.
inline MonteCarloEstimate a_pq_monte_carlo(double p, double q, std::size_t n,
                                           std::uint64_t seed, int threads = 1) {
  detail::check_pq(p, q);
  if (n < 2) throw ParameterError("Monte Carlo needs at least two samples");

  struct Acc {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  constexpr std::size_t kChunk = 1 << 16;
  const Acc total = chunked_reduce<Acc>(
      n, kChunk, threads, Acc{},
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng(derive_seed(seed, "stable-chunk", chunk));
        Acc a;
        for (std::size_t i = begin; i < end; ++i) {
          const double x = std::fabs(detail::stable_variate(q, rng));
          const double m = x > 0.0 ? std::pow(x, p) : 0.0;
          a.sum += m;
          a.sum_sq += m * m;
        }
        return a;
      },
      [](Acc acc, const Acc& part) {
        acc.sum += part.sum;
        acc.sum_sq += part.sum_sq;
        return acc;
      });

  MonteCarloEstimate est;
  est.n = n;
  est.raw_moment = total.sum / static_cast<double>(n);
  const double var =
      std::max(0.0, total.sum_sq / static_cast<double>(n) - est.raw_moment * est.raw_moment);
  const double se_mean = std::sqrt(var / static_cast<double>(n));
  est.estimate = std::pow(est.raw_moment, 1.0 / p);
  est.stderr_ = est.raw_moment > 0.0
                    ? est.estimate / (p * est.raw_moment) * se_mean
                    : 0.0;
  est.variance_finite = 2.0 * p < q;
  return est;
}

// --- derived bounds ---------------------------------------------------------

struct FactorizationBound {
  double bound = 0.0;
  double s = 0.0;  // the conjugate index: 1/p = 1/r + 1/s
};

/// Bound on the (p, r) factorization constant through a q-stable type
/// constant T_q: C <= T_q * A_{r,q} / A_{p,q}, for 0 < p < r < q <= 2.
inline FactorizationBound mn_constant_bound(double p, double r, double q, double type_constant) {
  if (!(p < r)) throw ParameterError("need p < r");
  detail::check_pq(r, q);
  detail::check_pq(p, q);
  if (!(type_constant >= 1.0)) throw ParameterError("type constant must be >= 1");
  FactorizationBound out;
  out.bound = type_constant * a_pq(r, q) / a_pq(p, q);
  out.s = 1.0 / (1.0 / p - 1.0 / r);
  return out;
}

struct ScanRow {
  double p = 0.0;
  double a_pq_value = 0.0;
  double ratio = 0.0;  // A_{r,q} / A_{p,q}
};

struct ScanResult {
  double r = 0.0;
  double q = 0.0;
  std::vector<ScanRow> rows;
  double max_ratio = 0.0;
};

/// Tabulates A_{r,q}/A_{p,q} over a grid of p values; the maximum being
/// finite is what makes the bound above uniform in p.
inline ScanResult uniform_bound_scan(double r, double q, const std::vector<double>& p_grid) {
  detail::check_pq(r, q);
  if (p_grid.empty()) throw ParameterError("scan grid is empty");
  ScanResult out;
  out.r = r;
  out.q = q;
  const double a_r = a_pq(r, q);
  for (double p : p_grid) {
    detail::check_pq(p, q);
    ScanRow row;
    row.p = p;
    row.a_pq_value = a_pq(p, q);
    row.ratio = a_r / row.a_pq_value;
    out.max_ratio = std::max(out.max_ratio, row.ratio);
    out.rows.push_back(row);
  }
  return out;
}

/// Evenly spaced grid helper for the CLI scan.
inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
  if (points < 2) throw ParameterError("linspace needs at least two points");
  if (!(lo < hi)) throw ParameterError("linspace needs lo < hi");
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  out.back() = hi;  // guard the right endpoint against accumulation error
  return out;
}

}  // namespace freelat

#endif  // FREELAT_STABLE_HPP
