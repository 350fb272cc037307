#ifndef FREELAT_CLI_HPP
#define FREELAT_CLI_HPP

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "freelat/acceptance.hpp"
#include "freelat/errors.hpp"
#include "freelat/expr.hpp"
#include "freelat/free_norm.hpp"
#include "freelat/hilbert.hpp"
#include "freelat/lattice.hpp"
#include "freelat/projectivity.hpp"
#include "freelat/rng.hpp"
#include "freelat/stable.hpp"

// Batch front end. Every subcommand resolves its full configuration, runs one
// computation, and emits the result in one of three formats. JSON output is
// byte-identical for a fixed config and seed once the timestamp is suppressed
// with --reproducible; CSV uses 17 significant digits and '.' decimals
// regardless of locale.
//
// Exit codes: 0 success, 2 invalid input (bad flags, domain errors, parse
// errors), 3 failed property or certificate check. self-test exits 1 when a
// criterion fails, since that is a verdict rather than an error.

namespace freelat::cli {

using json = nlohmann::ordered_json;

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// -- small parsers for flag payloads -----------------------------------------

inline std::vector<double> parse_double_list(const std::string& s, char sep = ',') {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(sep, pos);
    const std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
    if (tok.empty()) throw ParameterError("empty entry in numeric list '" + s + "'");
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParameterError("cannot parse '" + tok + "' as a number");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(s)) {
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw ParameterError("expected a positive integer, got '" + fmt17(v) + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// "x1,x2;y1,y2" -> a list of vectors. Used for certificates and tuples.
inline std::vector<std::vector<double>> parse_vector_list(const std::string& s) {
  std::vector<std::vector<double>> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(';', pos);
    out.push_back(parse_double_list(
        s.substr(pos, next == std::string::npos ? next : next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

/// "n=8,restarts=64,iters=200"; omitted keys keep their defaults.
inline SearchBudget parse_budget(const std::string& s) {
  SearchBudget budget;
  if (s.empty()) return budget;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(',', pos);
    const std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
    const std::size_t eq = tok.find('=');
    if (eq == std::string::npos) throw ParameterError("budget entry '" + tok + "' is not key=value");
    const std::string key = tok.substr(0, eq);
    int value = 0;
    try {
      value = std::stoi(tok.substr(eq + 1));
    } catch (const std::exception&) {
      throw ParameterError("budget value in '" + tok + "' is not an integer");
    }
    if (value < 1) throw ParameterError("budget value in '" + tok + "' must be >= 1");
    if (key == "n")
      budget.n_max = value;
    else if (key == "restarts")
      budget.restarts = value;
    else if (key == "iters")
      budget.iters = value;
    else
      throw ParameterError("unknown budget key '" + key + "'");
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return budget;
}

/// Accepts the canonical specs plus the shorthand lp:<r>:<d> for the
/// unweighted space.
inline CoordinateLattice parse_space(const std::string& s) {
  if (s.rfind("lp:", 0) == 0) return CoordinateLattice::parse("weightedlr:" + s.substr(3));
  return CoordinateLattice::parse(s);
}

/// "0=1.5,2=-0.25" -> scalar assignment; "0=1:2:3,1=0:0:1" -> vectors.
inline ScalarAssignment parse_scalar_assignment(const std::string& s) {
  ScalarAssignment a;
  for (const std::string& tok : [&] {
         std::vector<std::string> parts;
         std::size_t pos = 0;
         while (pos <= s.size()) {
           const std::size_t next = s.find(',', pos);
           parts.push_back(s.substr(pos, next == std::string::npos ? next : next - pos));
           if (next == std::string::npos) break;
           pos = next + 1;
         }
         return parts;
       }()) {
    const std::size_t eq = tok.find('=');
    if (eq == std::string::npos)
      throw ParameterError("assignment entry '" + tok + "' is not generator=value");
    a[static_cast<int>(std::stoul(tok.substr(0, eq)))] =
        parse_double_list(tok.substr(eq + 1)).at(0);
  }
  return a;
}

inline LatticeAssignment parse_lattice_assignment(const std::string& s) {
  LatticeAssignment a;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(',', pos);
    const std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
    const std::size_t eq = tok.find('=');
    if (eq == std::string::npos)
      throw ParameterError("assignment entry '" + tok + "' is not generator=v1:v2:...");
    a[static_cast<int>(std::stoul(tok.substr(0, eq)))] =
        parse_double_list(tok.substr(eq + 1), ':');
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return a;
}

// -- output machinery ---------------------------------------------------------

enum class Format { table, csv, json_fmt };

struct TableData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Payload {
  json result;
  std::optional<TableData> table;
};

inline json to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

inline json to_json(const std::vector<std::vector<double>>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

inline std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace detail {

/// Key/value view of a JSON payload for the csv and table formats. Arrays of
/// numbers are joined with ';' so a value never collides with the csv comma.
inline void flatten(const json& j, const std::string& prefix,
                    std::vector<std::pair<std::string, std::string>>& out) {
  auto leaf = [&](const json& v) -> std::string {
    if (v.is_number_float()) return fmt17(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      bool numeric = true;
      for (const auto& e : v)
        if (!e.is_number()) numeric = false;
      if (numeric) {
        std::string s;
        for (const auto& e : v) {
          if (!s.empty()) s += ';';
          s += e.is_number_float() ? fmt17(e.get<double>()) : e.dump();
        }
        return s;
      }
    }
    return v.dump();
  };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      const std::string key = prefix.empty() ? k : prefix + "." + k;
      if (v.is_object())
        flatten(v, key, out);
      else
        out.emplace_back(key, leaf(v));
    }
  } else {
    out.emplace_back(prefix.empty() ? "value" : prefix, leaf(j));
  }
}

}  // namespace detail

inline void emit(std::ostream& os, Format format, const std::string& command,
                 const json& config, const Payload& payload, bool reproducible) {
  if (format == Format::json_fmt) {
    json doc;
    doc["command"] = command;
    doc["config"] = config;
    if (!reproducible) doc["timestamp"] = timestamp_utc();
    doc["result"] = payload.result;
    os << doc.dump(2) << '\n';
    return;
  }
  if (format == Format::csv) {
    std::string header = "# " + command;
    for (const auto& [k, v] : config.items())
      header += " " + k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    os << header << '\n';
    if (payload.table) {
      for (std::size_t i = 0; i < payload.table->columns.size(); ++i)
        os << (i ? "," : "") << csv_escape(payload.table->columns[i]);
      os << '\n';
      for (const auto& row : payload.table->rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
        os << '\n';
      }
    } else {
      std::vector<std::pair<std::string, std::string>> kv;
      detail::flatten(payload.result, "", kv);
      os << "key,value\n";
      for (const auto& [k, v] : kv) os << csv_escape(k) << ',' << csv_escape(v) << '\n';
    }
    return;
  }
  // plain table
  if (payload.table) {
    std::vector<std::size_t> width(payload.table->columns.size(), 0);
    for (std::size_t i = 0; i < payload.table->columns.size(); ++i)
      width[i] = payload.table->columns[i].size();
    for (const auto& row : payload.table->rows)
      for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        os << cells[i];
        if (i + 1 < cells.size()) os << std::string(width[i] - cells[i].size() + 2, ' ');
      }
      os << '\n';
    };
    line(payload.table->columns);
    for (const auto& row : payload.table->rows) line(row);
  } else {
    std::vector<std::pair<std::string, std::string>> kv;
    detail::flatten(payload.result, "", kv);
    std::size_t width = 0;
    for (const auto& [k, v] : kv) width = std::max(width, k.size());
    for (const auto& [k, v] : kv) os << k << std::string(width - k.size(), ' ') << "  " << v << '\n';
  }
}

// -- subcommand bodies --------------------------------------------------------

namespace detail {

inline Payload run_fbl_norm(const std::string& expr_text, const std::string& space,
                            double p, const SearchBudget& budget, std::uint64_t seed,
                            const std::vector<std::string>& cert_args) {
  const Expr f = parse_expr(expr_text);
  const CoordinateLattice E = parse_space(space);
  std::vector<std::vector<std::vector<double>>> user_certs;
  for (const auto& arg : cert_args) {
    std::vector<std::vector<double>> cert = parse_vector_list(arg);
    // An explicit certificate must hold; auto-generated candidates may be
    // dropped quietly, but a rejected user certificate fails the run.
    fpbl_upper(f, E, p, cert, 256, derive_seed(seed, "user-cert", user_certs.size()));
    user_certs.push_back(std::move(cert));
  }
  const NormBracket b = norm_bracket(f, E, p, budget, seed, user_certs);
  Payload out;
  out.result["expr"] = print_expr(f);
  out.result["space"] = space;
  out.result["p"] = p;
  out.result["lower"] = b.lower;
  out.result["upper"] = b.upper;
  out.result["certificates"]["lower"] = to_json(b.lower_certificate.rows);
  out.result["certificates"]["upper"] = to_json(b.upper_certificate);
  json flags = json::array();
  for (const auto& nte : b.notes) flags.push_back(nte);
  out.result["flags"] = std::move(flags);
  return out;
}

inline Payload run_apq(double p, double q, std::size_t mc, std::uint64_t seed, int threads) {
  Payload out;
  out.result["p"] = p;
  out.result["q"] = q;
  out.result["value"] = a_pq(p, q);
  out.result["small_p_limit"] = a_pq_limit(q);
  if (mc > 0) {
    const MonteCarloEstimate e = a_pq_monte_carlo(p, q, mc, seed, threads);
    out.result["mc"]["estimate"] = e.estimate;
    out.result["mc"]["stderr"] = e.stderr_;
    out.result["mc"]["raw_moment"] = e.raw_moment;
    out.result["mc"]["n"] = e.n;
    out.result["mc"]["variance_finite"] = e.variance_finite;
  }
  return out;
}

inline Payload run_mn_bound(double p, double r, double q, double type_const) {
  const FactorizationBound b = mn_constant_bound(p, r, q, type_const);
  Payload out;
  out.result["p"] = p;
  out.result["r"] = r;
  out.result["q"] = q;
  out.result["type_const"] = type_const;
  out.result["bound"] = b.bound;
  out.result["s"] = b.s;
  return out;
}

inline Payload run_apq_scan(double r, double q, double lo, double hi, std::size_t points) {
  const ScanResult scan = uniform_bound_scan(r, q, linspace(lo, hi, points));
  Payload out;
  out.result["r"] = scan.r;
  out.result["q"] = scan.q;
  out.result["max_ratio"] = scan.max_ratio;
  json rows = json::array();
  TableData table;
  table.columns = {"p", "a_pq", "ratio"};
  for (const auto& row : scan.rows) {
    rows.push_back({{"p", row.p}, {"a_pq", row.a_pq_value}, {"ratio", row.ratio}});
    table.rows.push_back({fmt17(row.p), fmt17(row.a_pq_value), fmt17(row.ratio)});
  }
  out.result["rows"] = std::move(rows);
  out.table = std::move(table);
  return out;
}

inline Payload run_stable_sample(double q, std::size_t n, std::uint64_t seed) {
  StableSpec spec;
  spec.q = q;
  spec.n = n;
  spec.seed = seed;
  const std::vector<double> samples = sample_stable(spec);
  Payload out;
  out.result["q"] = q;
  out.result["n"] = n;
  out.result["samples"] = to_json(samples);
  TableData table;
  table.columns = {"index", "value"};
  for (std::size_t i = 0; i < samples.size(); ++i)
    table.rows.push_back({std::to_string(i), fmt17(samples[i])});
  out.table = std::move(table);
  return out;
}

inline Payload run_hilbert_table(const std::vector<std::size_t>& n_list, std::size_t cells) {
  const std::vector<DivergenceRow> rows = divergence_table(n_list, cells);
  Payload out;
  json jrows = json::array();
  TableData table;
  table.columns = {"n", "grid_min", "log_2n_minus_1", "weak_l1_lb"};
  for (const auto& row : rows) {
    jrows.push_back({{"n", row.n},
                     {"grid_min", row.grid_min},
                     {"log_2n_minus_1", row.predicted_min},
                     {"weak_l1_lb", row.weak_l1},
                     {"cells", row.cells}});
    table.rows.push_back({std::to_string(row.n), fmt17(row.grid_min),
                          fmt17(row.predicted_min), fmt17(row.weak_l1)});
  }
  out.result["rows"] = std::move(jrows);
  out.table = std::move(table);
  return out;
}

inline Payload run_lemma_check(std::size_t n_max, std::size_t samples, double tol) {
  Payload out;
  json jrows = json::array();
  TableData table;
  table.columns = {"n", "symmetry", "cell_unimodal", "minima_ordered", "worst_symmetry_gap"};
  bool all_ok = true;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const LemmaCheck c = f_n_lemma_check(n, samples, tol);
    all_ok = all_ok && c.all();
    jrows.push_back({{"n", c.n},
                     {"symmetry", c.symmetry},
                     {"cell_unimodal", c.cell_unimodal},
                     {"minima_ordered", c.minima_ordered},
                     {"worst_symmetry_gap", c.worst_symmetry_gap}});
    table.rows.push_back({std::to_string(c.n), c.symmetry ? "true" : "false",
                          c.cell_unimodal ? "true" : "false",
                          c.minima_ordered ? "true" : "false", fmt17(c.worst_symmetry_gap)});
  }
  out.result["all_pass"] = all_ok;
  out.result["rows"] = std::move(jrows);
  out.table = std::move(table);
  return out;
}

inline Payload run_projectivity(std::size_t N, double p, std::size_t trials,
                                std::size_t sandwich_vectors, const SearchBudget& budget,
                                std::uint64_t seed) {
  const AlphaFamily fam = build_alpha(N, p);  // throws unless beta o alpha = id
  Payload out;
  out.result["N"] = N;
  out.result["p"] = p;
  out.result["identity"] = true;

  const DisjointnessReport dis = alpha_disjointness(fam, trials, seed);
  out.result["disjointness"]["trials"] = dis.trials;
  out.result["disjointness"]["violations"] = dis.violations;
  out.result["disjointness"]["worst_pair_min"] = dis.worst_pair_min;

  const CoordinateLattice E = CoordinateLattice::weighted_lr(p, N);
  double worst_norm_dev = 0.0;
  json norm_certs = json::array();
  for (std::size_t n = 0; n < N; ++n) {
    std::vector<double> en(N, 0.0);
    en[n] = 1.0;
    const double u = fpbl_upper(fam.exprs[n], E, p, {en}, 500, derive_seed(seed, "fn-norm", n));
    worst_norm_dev = std::max(worst_norm_dev, std::fabs(u - 1.0));
    norm_certs.push_back(to_json(en));
  }
  out.result["norm_one"]["worst_deviation"] = worst_norm_dev;

  Rng rng(derive_seed(seed, "sandwich-coeffs"));
  json rows = json::array();
  double worst_gap = 0.0;
  json example_cert;
  for (std::size_t trial = 0; trial < sandwich_vectors; ++trial) {
    std::vector<double> a(N);
    for (double& v : a) v = rng.uniform(-2.0, 2.0);
    double biggest = 0.0;
    for (double v : a) biggest = std::max(biggest, std::fabs(v));
    if (biggest < 0.1) a[0] = 1.0;
    const SandwichReport rep = alpha_norm_sandwich(fam, a, budget, derive_seed(seed, "sandwich", trial));
    const double gap = rep.upper > 0.0 ? (rep.upper - rep.lower) / rep.upper : 0.0;
    worst_gap = std::max(worst_gap, gap);
    rows.push_back({{"target", rep.target}, {"lower", rep.lower}, {"upper", rep.upper}});
    if (trial == 0) example_cert = to_json(a);
  }
  out.result["sandwich"]["vectors"] = sandwich_vectors;
  out.result["sandwich"]["worst_gap_fraction"] = worst_gap;
  out.result["sandwich"]["rows"] = std::move(rows);

  const BallFamilyReport balls = ball_family_check(p, trials, derive_seed(seed, "balls"));
  out.result["ball_family"]["trials"] = balls.trials;
  out.result["ball_family"]["intersect_failures"] = balls.intersect_failures;
  out.result["ball_family"]["disjoint_fit_failures"] = balls.disjoint_fit_failures;
  out.result["ball_family"]["quasi_triangle_failures"] = balls.quasi_triangle_failures;

  out.result["certificates"]["norm_one_upper"] = std::move(norm_certs);
  out.result["certificates"]["first_sandwich_coeffs"] = std::move(example_cert);
  return out;
}

inline Payload run_convexity(const std::string& space, double p, std::size_t trials,
                             std::uint64_t seed, const std::string& p_list) {
  const CoordinateLattice L = parse_space(space);
  Payload out;
  out.result["space"] = space;
  if (!p_list.empty()) {
    const std::vector<ConvexityReport> scan =
        convexity_monotonicity_scan(L, parse_double_list(p_list), trials, seed);
    json rows = json::array();
    TableData table;
    table.columns = {"p", "bound", "trials"};
    for (const auto& rep : scan) {
      rows.push_back({{"p", rep.exponent}, {"bound", rep.bound}, {"trials", rep.trials}});
      table.rows.push_back({fmt17(rep.exponent), fmt17(rep.bound), std::to_string(rep.trials)});
    }
    out.result["rows"] = std::move(rows);
    out.table = std::move(table);
    return out;
  }
  const ConvexityReport rep = p_convexity_lower_bound(L, p, trials, seed);
  out.result["p"] = rep.exponent;
  out.result["bound"] = rep.bound;
  out.result["trials"] = rep.trials;
  out.result["witness"] = to_json(rep.witness);
  return out;
}

inline Payload run_lconvexity(const std::string& space, const std::string& u_text,
                              const std::string& xs_text, double eps) {
  const CoordinateLattice L = parse_space(space);
  const std::vector<double> u = parse_double_list(u_text);
  const std::vector<std::vector<double>> xs = parse_vector_list(xs_text);
  const bool violation = l_convexity_violation(L, u, xs, eps);
  Payload out;
  out.result["space"] = space;
  out.result["eps"] = eps;
  out.result["k"] = xs.size();
  out.result["violation"] = violation;
  return out;
}

inline Payload run_expr_eval(const std::string& expr_text, const std::string& at,
                             const std::string& vec) {
  const Expr e = parse_expr(expr_text);
  Payload out;
  out.result["canonical"] = print_expr(e);
  json gens = json::array();
  for (int g : e.generators()) gens.push_back(g);
  out.result["generators"] = std::move(gens);
  out.result["linear"] = e.is_linear();
  if (!at.empty() && !vec.empty())
    throw ParameterError("--at and --vec are mutually exclusive");
  if (!at.empty()) out.result["value"] = evaluate_scalar(e, parse_scalar_assignment(at));
  if (!vec.empty()) out.result["values"] = to_json(evaluate_lattice(e, parse_lattice_assignment(vec)));
  return out;
}

inline Payload run_self_test(const std::string& filter, int threads, bool& all_ok) {
  const std::vector<acceptance::CriterionResult> results = acceptance::run(filter, threads);
  all_ok = acceptance::all_pass(results);
  Payload out;
  json rows = json::array();
  TableData table;
  table.columns = {"verdict", "id", "criterion", "seconds", "details"};
  for (const auto& r : results) {
    rows.push_back({{"id", r.id},
                    {"name", r.name},
                    {"pass", r.pass},
                    {"seconds", r.seconds},
                    {"details", r.details}});
    table.rows.push_back({r.pass ? "PASS" : "FAIL", std::to_string(r.id), r.name,
                          fmt17(r.seconds), r.details});
  }
  out.result["all_pass"] = all_ok;
  out.result["criteria"] = std::move(rows);
  out.table = std::move(table);
  return out;
}

}  // namespace detail

// -- driver --------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& os = std::cout,
                   std::ostream& es = std::cerr) {
  CLI::App app{"Numerical toolkit for quasi-Banach lattice constructions"};
  app.require_subcommand(1);

  bool want_json = false, want_csv = false, want_table = false, reproducible = false;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_flag("--json", want_json, "emit a JSON document");
  app.add_flag("--csv", want_csv, "emit CSV rows");
  app.add_flag("--table", want_table, "emit an aligned text table (default)");
  app.add_option("--seed", seed, "root seed; per-module streams are derived from it");
  app.add_option("--threads", threads, "worker thread cap (results are identical for any value)")
      ->check(CLI::Range(1, 256));
  app.add_flag("--reproducible", reproducible, "suppress the timestamp in JSON output");

  std::string expr_text, space = "lp:1:2", budget_text, at_text, vec_text, u_text, xs_text;
  std::string filter, p_list;
  std::vector<std::string> cert_args;
  double p = 1.0, q = 1.0, r = 0.5, lo = 1e-4, hi = 0.499, type_const = 1.0, eps = 0.25, tol = 1e-10;
  std::size_t mc = 0, n_count = 100, points = 200, cells = 10001, big_n = 12, trials = 10000;
  std::size_t n_max = 64, samples = 40, sandwich_vectors = 20;
  std::string n_list_text = "1,2,4,8,16,32,64";
  std::size_t conv_trials = 200;

  CLI::App* cmd_fbl = app.add_subcommand("fbl-norm", "two-sided free-lattice norm bracket");
  cmd_fbl->add_option("--expr", expr_text, "prefix expression")->required();
  cmd_fbl->add_option("--space", space, "lp:<r>:<d>, lpgrid:<p>:<n>, or weightedlr:<r>:<d>[:w,..]");
  cmd_fbl->add_option("--p", p, "lattice exponent in (0,1]")->required();
  cmd_fbl->add_option("--budget", budget_text, "search budget, e.g. n=8,restarts=64");
  cmd_fbl->add_option("--cert", cert_args, "upper certificate 'x1,x2;y1,y2' (repeatable)");

  CLI::App* cmd_apq = app.add_subcommand("apq", "q-stable moment constant A_{p,q}");
  cmd_apq->add_option("--p", p, "moment order, 0 < p < q")->required();
  cmd_apq->add_option("--q", q, "stability index in (0,2]")->required();
  cmd_apq->add_option("--mc", mc, "Monte Carlo cross-check with this many samples");

  CLI::App* cmd_mn = app.add_subcommand("mn-bound", "lattice-morphism factorization bound");
  cmd_mn->add_option("--p", p, "target moment order")->required();
  cmd_mn->add_option("--r", r, "source moment order, p < r")->required();
  cmd_mn->add_option("--q", q, "stability index")->required();
  cmd_mn->add_option("--type-const", type_const, "stable type constant, >= 1");

  CLI::App* cmd_scan = app.add_subcommand("apq-scan", "A_{r,q}/A_{p,q} over a p grid");
  cmd_scan->add_option("--r", r, "fixed numerator order")->required();
  cmd_scan->add_option("--q", q, "stability index")->required();
  cmd_scan->add_option("--lo", lo, "left end of the p grid");
  cmd_scan->add_option("--hi", hi, "right end of the p grid");
  cmd_scan->add_option("--points", points, "grid size");

  CLI::App* cmd_sample = app.add_subcommand("stable-sample", "draw symmetric q-stable variates");
  cmd_sample->add_option("--q", q, "stability index in (0,2]")->required();
  cmd_sample->add_option("--n", n_count, "sample count");

  CLI::App* cmd_hilbert = app.add_subcommand("hilbert-table", "grid minima and weak-L1 growth");
  cmd_hilbert->add_option("--n", n_list_text, "comma list of n values");
  cmd_hilbert->add_option("--cells", cells, "grid cells (>= 16 max n)");

  CLI::App* cmd_lemma = app.add_subcommand("lemma-check", "structure checks for the comb functions");
  cmd_lemma->add_option("--n-max", n_max, "check every n up to this");
  cmd_lemma->add_option("--samples", samples, "samples per grid cell");
  cmd_lemma->add_option("--tol", tol, "symmetry tolerance");

  CLI::App* cmd_proj = app.add_subcommand("projectivity", "complemented lp-copy construction checks");
  cmd_proj->add_option("--N", big_n, "number of generators")->required();
  cmd_proj->add_option("--p", p, "lattice exponent in (0,1]")->required();
  cmd_proj->add_option("--trials", trials, "randomized trials per property");
  cmd_proj->add_option("--sandwich", sandwich_vectors, "random coefficient vectors");
  cmd_proj->add_option("--budget", budget_text, "search budget for the lower bounds");

  CLI::App* cmd_conv = app.add_subcommand("convexity", "p-convexity constant lower bound");
  cmd_conv->add_option("--space", space, "lattice spec")->required();
  cmd_conv->add_option("--p", p, "convexity exponent");
  cmd_conv->add_option("--trials", conv_trials, "random tuples");
  cmd_conv->add_option("--p-list", p_list, "comma list of exponents for a monotone scan");

  CLI::App* cmd_lconv = app.add_subcommand("lconvexity", "test an L-convexity violation witness");
  cmd_lconv->add_option("--space", space, "lattice spec")->required();
  cmd_lconv->add_option("--u", u_text, "unit vector, comma coords")->required();
  cmd_lconv->add_option("--xs", xs_text, "candidate vectors, ';' separated")->required();
  cmd_lconv->add_option("--eps", eps, "epsilon in (0,1)");

  CLI::App* cmd_eval = app.add_subcommand("expr-eval", "parse, canonicalize, evaluate");
  cmd_eval->add_option("--expr", expr_text, "prefix expression")->required();
  cmd_eval->add_option("--at", at_text, "scalar assignment 0=1.5,1=-2");
  cmd_eval->add_option("--vec", vec_text, "vector assignment 0=1:2:3,1=0:0:1");

  CLI::App* cmd_self = app.add_subcommand("self-test", "run the acceptance gate");
  cmd_self->add_option("--filter", filter, "only criteria whose name contains this");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, os, es);
    return code == 0 ? 0 : 2;
  }

  Format format = Format::table;
  if (static_cast<int>(want_json) + static_cast<int>(want_csv) + static_cast<int>(want_table) > 1) {
    es << "error: pick at most one of --json, --csv, --table\n";
    return 2;
  }
  if (want_json) format = Format::json_fmt;
  if (want_csv) format = Format::csv;

  json config;
  config["seed"] = seed;
  config["threads"] = threads;
  config["format"] = want_json ? "json" : (want_csv ? "csv" : "table");
  config["reproducible"] = reproducible;

  std::string command;
  Payload payload;
  bool self_test_ok = true;
  try {
    if (*cmd_fbl) {
      command = "fbl-norm";
      const SearchBudget budget = parse_budget(budget_text);
      config["expr"] = expr_text;
      config["space"] = space;
      config["p"] = p;
      config["budget"] = {{"n", budget.n_max}, {"restarts", budget.restarts}, {"iters", budget.iters}};
      payload = detail::run_fbl_norm(expr_text, space, p, budget, seed, cert_args);
    } else if (*cmd_apq) {
      command = "apq";
      config["p"] = p;
      config["q"] = q;
      config["mc"] = mc;
      payload = detail::run_apq(p, q, mc, seed, threads);
    } else if (*cmd_mn) {
      command = "mn-bound";
      config["p"] = p;
      config["r"] = r;
      config["q"] = q;
      config["type_const"] = type_const;
      payload = detail::run_mn_bound(p, r, q, type_const);
    } else if (*cmd_scan) {
      command = "apq-scan";
      config["r"] = r;
      config["q"] = q;
      config["lo"] = lo;
      config["hi"] = hi;
      config["points"] = points;
      payload = detail::run_apq_scan(r, q, lo, hi, points);
    } else if (*cmd_sample) {
      command = "stable-sample";
      config["q"] = q;
      config["n"] = n_count;
      payload = detail::run_stable_sample(q, n_count, seed);
    } else if (*cmd_hilbert) {
      command = "hilbert-table";
      config["n"] = n_list_text;
      config["cells"] = cells;
      payload = detail::run_hilbert_table(parse_size_list(n_list_text), cells);
    } else if (*cmd_lemma) {
      command = "lemma-check";
      config["n_max"] = n_max;
      config["samples"] = samples;
      config["tol"] = tol;
      payload = detail::run_lemma_check(n_max, samples, tol);
    } else if (*cmd_proj) {
      command = "projectivity";
      const SearchBudget budget = parse_budget(
          budget_text.empty() ? "n=" + std::to_string(big_n) + ",restarts=12,iters=60" : budget_text);
      config["N"] = big_n;
      config["p"] = p;
      config["trials"] = trials;
      config["sandwich"] = sandwich_vectors;
      payload = detail::run_projectivity(big_n, p, trials, sandwich_vectors, budget, seed);
    } else if (*cmd_conv) {
      command = "convexity";
      config["space"] = space;
      config["p"] = p;
      config["trials"] = conv_trials;
      if (!p_list.empty()) config["p_list"] = p_list;
      payload = detail::run_convexity(space, p, conv_trials, seed, p_list);
    } else if (*cmd_lconv) {
      command = "lconvexity";
      config["space"] = space;
      config["eps"] = eps;
      payload = detail::run_lconvexity(space, u_text, xs_text, eps);
    } else if (*cmd_eval) {
      command = "expr-eval";
      config["expr"] = expr_text;
      if (!at_text.empty()) config["at"] = at_text;
      if (!vec_text.empty()) config["vec"] = vec_text;
      payload = detail::run_expr_eval(expr_text, at_text, vec_text);
    } else if (*cmd_self) {
      command = "self-test";
      if (!filter.empty()) config["filter"] = filter;
      payload = detail::run_self_test(filter, threads, self_test_ok);
    }
  } catch (const Error& e) {
    const bool validation = dynamic_cast<const ParameterError*>(&e) ||
                            dynamic_cast<const DomainError*>(&e) ||
                            dynamic_cast<const DimensionError*>(&e) ||
                            dynamic_cast<const ParseError*>(&e) ||
                            dynamic_cast<const SingularityError*>(&e) ||
                            dynamic_cast<const ResolutionError*>(&e) ||
                            dynamic_cast<const UnassignedGeneratorError*>(&e);
    es << "error: " << e.what() << '\n';
    if (format == Format::json_fmt) {
      json err;
      err["error"]["type"] = validation ? "validation" : "property";
      err["error"]["message"] = e.what();
      if (const auto* ce = dynamic_cast<const CertificateError*>(&e))
        err["error"]["witness"] = to_json(ce->witness());
      os << err.dump(2) << '\n';
    }
    return validation ? 2 : 3;
  } catch (const std::exception& e) {
    es << "error: " << e.what() << '\n';
    return 3;
  }

  emit(os, format, command, config, payload, reproducible);
  return *cmd_self && !self_test_ok ? 1 : 0;
}

}  // namespace freelat::cli

#endif  // FREELAT_CLI_HPP
