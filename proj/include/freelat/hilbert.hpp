#ifndef FREELAT_HILBERT_HPP
#define FREELAT_HILBERT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "freelat/errors.hpp"

// The divergence construction behind the failure of the Hilbert transform
// on L^1: for the indicator of [a, b] the (principal value) transform has
// the closed form log|(x-a)/(x-b)|, and the n-cell comb
//
//   F_n(x) = sum_{k=1}^n | log| (x - (k-1)/n) / (x - k/n) | |
//
// has minimum over [0, 1] equal to log(2n - 1), attained at the first cell
// midpoint 1/(2n). So F_n is everywhere >= log(2n-1) while each summand
// comes from an indicator of mass 1/n: no uniform weak-L1 control survives.

namespace freelat {

/// Hilbert transform of the indicator of [a, b] at x (up to the 1/pi
/// normalization): log|(x-a)/(x-b)|. x = a and x = b are logarithmic
/// singularities and rejected.
inline double hilbert_indicator(double a, double b, double x) {
  if (!(a < b)) throw ParameterError("need a < b");
  if (x == a || x == b) throw SingularityError("evaluation at an endpoint singularity");
  return std::log(std::fabs((x - a) / (x - b)));
}

/// The comb F_n. Singular exactly at the grid points k/n, k = 0..n.
inline double f_n(std::size_t n, double x) {
  if (n == 0) throw ParameterError("n must be >= 1");
  const double nd = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double a = static_cast<double>(k - 1) / nd;
    const double b = static_cast<double>(k) / nd;
    if (x == a || x == b) throw SingularityError("F_n evaluated on its singular grid");
    acc += std::fabs(std::log(std::fabs((x - a) / (x - b))));
  }
  return acc;
}

/// Everything the structure lemma for F_n asserts, checked by sampling:
/// symmetry about 1/2, decrease-then-increase on every cell about its
/// midpoint, and minima that grow toward the middle cells.
struct LemmaCheck {
  std::size_t n = 0;
  bool symmetry = true;
  bool cell_unimodal = true;
  bool minima_ordered = true;
  double worst_symmetry_gap = 0.0;

  bool all() const { return symmetry && cell_unimodal && minima_ordered; }
};

inline LemmaCheck f_n_lemma_check(std::size_t n, std::size_t samples_per_cell = 40,
                                  double tol = 1e-10) {
  if (n == 0) throw ParameterError("n must be >= 1");
  if (samples_per_cell < 4) throw ParameterError("need at least 4 samples per cell");
  LemmaCheck out;
  out.n = n;
  const double nd = static_cast<double>(n);

  // (i) F_n(x) = F_n(1-x). Sample every cell strictly inside, away from the
  // edges: near a node x = k/n the log term's condition number is 1/dist, so
  // points closer than half a sample step would drown the comparison in
  // rounding noise long before the tolerance means anything.
  for (std::size_t k = 1; k <= n; ++k) {
    const double lo = static_cast<double>(k - 1) / nd;
    const double width = 1.0 / nd;
    for (std::size_t s = 0; s < samples_per_cell; ++s) {
      const double frac = (static_cast<double>(s) + 0.5) / static_cast<double>(samples_per_cell);
      const double x = lo + frac * width;
      const double gap = std::fabs(f_n(n, x) - f_n(n, 1.0 - x));
      out.worst_symmetry_gap = std::max(out.worst_symmetry_gap, gap);
      if (gap > tol) out.symmetry = false;
    }
  }

  // (ii) on each cell ((k-1)/n, k/n) the sign pattern of finite differences
  // flips exactly once, from decreasing to increasing, at the midpoint.
  for (std::size_t k = 1; k <= n && out.cell_unimodal; ++k) {
    const double lo = static_cast<double>(k - 1) / nd;
    const double width = 1.0 / nd;
    double prev = 0.0;
    bool have_prev = false;
    bool increasing_seen = false;
    for (std::size_t s = 0; s < samples_per_cell; ++s) {
      const double frac = (static_cast<double>(s) + 0.5) / static_cast<double>(samples_per_cell);
      const double x = lo + frac * width;
      const double v = f_n(n, x);
      if (have_prev) {
        const bool up = v > prev + tol;
        const bool down = v < prev - tol;
        if (down && increasing_seen) out.cell_unimodal = false;
        if (up) increasing_seen = true;
        // the turn must happen around the midpoint: decreasing steps may
        // only occur in the left half, increasing ones in the right half
        const double mid = lo + 0.5 * width;
        if (up && x < mid - width / static_cast<double>(samples_per_cell)) out.cell_unimodal = false;
        if (down && x > mid + width / static_cast<double>(samples_per_cell)) out.cell_unimodal = false;
      }
      prev = v;
      have_prev = true;
    }
  }

  // (iii) minima increase toward the center: F_n at (2k-1)/(2n) is
  // nondecreasing for k up to ceil(n/2).
  double prev_min = 0.0;
  for (std::size_t k = 1; 2 * k <= n + 1; ++k) {
    const double xk = (2.0 * static_cast<double>(k) - 1.0) / (2.0 * nd);
    const double v = f_n(n, xk);
    if (k > 1 && v < prev_min - tol) out.minima_ordered = false;
    prev_min = v;
  }
  return out;
}

// --- grid functions and weak-L1 ---------------------------------------------

/// Piecewise-constant function on an even grid over [lo, hi]: value j lives
/// on the j-th cell.
struct GridFunction {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;

  double cell_width() const { return (hi - lo) / static_cast<double>(values.size()); }
};

/// sup_t t * mu{ |f| > t } for a grid function: with values sorted in
/// decreasing order the sup is max_j value_(j) * (j * cell width).
inline double weak_l1_norm(const GridFunction& g) {
  if (g.values.empty()) throw ParameterError("grid function has no cells");
  if (!(g.lo < g.hi)) throw ParameterError("grid needs lo < hi");
  std::vector<double> sorted(g.values.size());
  for (std::size_t j = 0; j < g.values.size(); ++j) sorted[j] = std::fabs(g.values[j]);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const double w = g.cell_width();
  double best = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j)
    best = std::max(best, sorted[j] * (static_cast<double>(j + 1) * w));
  return best;
}

namespace detail {

/// True when some cell midpoint (2j+1)/(2m) hits a singular point k/n.
inline bool grid_hits_singularity(std::size_t n, std::size_t m) {
  // (2j+1)/(2m) = k/n  <=>  n(2j+1) = 2km
  for (std::size_t k = 1; k < n; ++k) {
    const std::uint64_t lhs = 2ULL * k * m;
    if (lhs % n != 0) continue;
    const std::uint64_t q = lhs / n;  // must equal 2j+1 for some j < m
    if (q % 2 == 1 && (q - 1) / 2 < m) return true;
  }
  return false;
}

}  // namespace detail

/// F_n sampled at the midpoints of m cells over [0, 1]. The cell count is
/// bumped (deterministically) past any value whose midpoints collide with
/// the singular grid; with the default 10^4 + 1 this matters for even n,
/// where 1/2 is both singular and a midpoint of every odd grid.
inline GridFunction f_n_grid(std::size_t n, std::size_t cells) {
  if (n == 0) throw ParameterError("n must be >= 1");
  if (cells < 16 * n)
    throw ResolutionError("grid too coarse: need at least 16 cells per singular cell");
  std::size_t m = cells;
  while (detail::grid_hits_singularity(n, m)) ++m;
  GridFunction g;
  g.values.resize(m);
  const double md = static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j)
    g.values[j] = f_n(n, (2.0 * static_cast<double>(j) + 1.0) / (2.0 * md));
  return g;
}

struct DivergenceRow {
  std::size_t n = 0;
  std::size_t cells = 0;
  double grid_min = 0.0;       // adaptively refined minimum of F_n
  double predicted_min = 0.0;  // log(2n - 1)
  double weak_l1 = 0.0;        // lower estimate from the grid
};

/// One row per n: the adaptive minimum of F_n over [0, 1] (coarse scan,
/// then two rounds of 100x refinement around the best cells), the predicted
/// value log(2n-1), and the grid weak-L1 lower estimate.
inline DivergenceRow divergence_row(std::size_t n, std::size_t cells) {
  const GridFunction g = f_n_grid(n, cells);
  const std::size_t m = g.values.size();

  std::size_t best_j = 0;
  for (std::size_t j = 1; j < m; ++j)
    if (g.values[j] < g.values[best_j]) best_j = j;

  // refine twice around the current best abscissa
  double center = (2.0 * static_cast<double>(best_j) + 1.0) / (2.0 * static_cast<double>(m));
  double radius = 1.0 / static_cast<double>(m);
  double best = g.values[best_j];
  for (int round = 0; round < 2; ++round) {
    const std::size_t fine = 201;
    double local_best_x = center;
    for (std::size_t s = 0; s < fine; ++s) {
      const double x = center + radius * (2.0 * static_cast<double>(s) / (fine - 1) - 1.0);
      if (x <= 0.0 || x >= 1.0) continue;
      double v;
      try {
        v = f_n(n, x);
      } catch (const SingularityError&) {
        continue;
      }
      if (v < best) {
        best = v;
        local_best_x = x;
      }
    }
    center = local_best_x;
    radius /= 100.0;
  }

  DivergenceRow row;
  row.n = n;
  row.cells = m;
  row.grid_min = best;
  row.predicted_min = std::log(2.0 * static_cast<double>(n) - 1.0);
  row.weak_l1 = weak_l1_norm(g);
  return row;
}

/// The full table; cells is validated against the largest n.
inline std::vector<DivergenceRow> divergence_table(const std::vector<std::size_t>& n_list,
                                                   std::size_t cells) {
  if (n_list.empty()) throw ParameterError("empty n list");
  for (std::size_t n : n_list)
    if (n == 0) throw ParameterError("n must be >= 1");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  if (cells < 16 * n_max)
    throw ResolutionError("cell count " + std::to_string(cells) + " too small for n = " +
                          std::to_string(n_max) + " (need >= " + std::to_string(16 * n_max) + ")");
  std::vector<DivergenceRow> rows;
  rows.reserve(n_list.size());
  for (std::size_t n : n_list) rows.push_back(divergence_row(n, cells));
  return rows;
}

}  // namespace freelat

#endif  // FREELAT_HILBERT_HPP
