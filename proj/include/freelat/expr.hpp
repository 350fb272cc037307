#ifndef FREELAT_EXPR_HPP
#define FREELAT_EXPR_HPP

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "freelat/errors.hpp"

namespace freelat {

/// Expressions in the functional calculus of a vector lattice: terms built
/// from generators by linear combination, lattice join/meet, modulus,
/// positive part and power sums. Every expression is positively homogeneous
/// of degree 1 in its assignment, which is what makes coordinatewise
/// evaluation of lattice-valued assignments legitimate.
///
/// Trees are immutable and shared; copying an Expr is cheap.
class Expr {
public:
  enum class Kind { Generator, Scale, Add, Sup, Inf, Abs, Pos, PowerSum };

  struct Node {
    Kind kind = Kind::Generator;
    int index = -1;          // Generator
    double scalar = 0.0;     // Scale: coefficient, PowerSum: exponent
    std::vector<Expr> args;  // children

    explicit Node(Kind k) : kind(k) {}
  };

  /// δ-generator with the given nonnegative index.
  static Expr gen(int index) {
    if (index < 0) throw ParameterError("generator index must be >= 0");
    Node n{Kind::Generator};
    n.index = index;
    return Expr(std::move(n));
  }

  /// c * e for an arbitrary real coefficient (linear-combination building
  /// block; see scale_expr for the nonnegative-rescaling entry point).
  static Expr scale(double c, Expr e) {
    if (!std::isfinite(c)) throw ParameterError("scale coefficient must be finite");
    Node n{Kind::Scale};
    n.scalar = c;
    n.args = {std::move(e)};
    return Expr(std::move(n));
  }

  static Expr add(Expr a, Expr b) { return binary(Kind::Add, std::move(a), std::move(b)); }
  static Expr sub(Expr a, Expr b) { return add(std::move(a), scale(-1.0, std::move(b))); }
  static Expr sup(Expr a, Expr b) { return binary(Kind::Sup, std::move(a), std::move(b)); }
  static Expr inf(Expr a, Expr b) { return binary(Kind::Inf, std::move(a), std::move(b)); }

  static Expr abs(Expr e) { return unary(Kind::Abs, std::move(e)); }
  static Expr pos(Expr e) { return unary(Kind::Pos, std::move(e)); }

  /// (sum_i |e_i|^s)^(1/s) with s > 0, under the convention 0^s = 0.
  static Expr power_sum(double s, std::vector<Expr> children) {
    if (!(s > 0.0) || !std::isfinite(s))
      throw ParameterError("power-sum exponent must be positive and finite");
    if (children.empty()) throw ParameterError("power-sum needs at least one child");
    Node n{Kind::PowerSum};
    n.scalar = s;
    n.args = std::move(children);
    return Expr(std::move(n));
  }

  const Node& node() const { return *node_; }
  Kind kind() const { return node_->kind; }

  /// Collects the generator indices that occur in the tree.
  std::set<int> generators() const {
    std::set<int> out;
    collect(out);
    return out;
  }

  /// True when the tree uses only Generator/Scale/Add nodes, i.e. the
  /// expression is a plain linear combination of generators.
  bool is_linear() const {
    switch (node_->kind) {
      case Kind::Generator:
        return true;
      case Kind::Scale:
      case Kind::Add:
        for (const Expr& a : node_->args)
          if (!a.is_linear()) return false;
        return true;
      default:
        return false;
    }
  }

private:
  explicit Expr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  static Expr binary(Kind k, Expr a, Expr b) {
    Node n{k};
    n.args = {std::move(a), std::move(b)};
    return Expr(std::move(n));
  }

  static Expr unary(Kind k, Expr e) {
    Node n{k};
    n.args = {std::move(e)};
    return Expr(std::move(n));
  }

  void collect(std::set<int>& out) const {
    if (node_->kind == Kind::Generator) out.insert(node_->index);
    for (const Expr& a : node_->args) a.collect(out);
  }

  std::shared_ptr<const Node> node_;
};

/// Maps generator indices to real values.
using ScalarAssignment = std::map<int, double>;

/// Maps generator indices to vectors of one common dimension.
using LatticeAssignment = std::map<int, std::vector<double>>;

/// Evaluates an expression at a scalar assignment. Throws
/// UnassignedGeneratorError when a generator in the tree has no value.
inline double evaluate_scalar(const Expr& e, const ScalarAssignment& a) {
  const Expr::Node& n = e.node();
  switch (n.kind) {
    case Expr::Kind::Generator: {
      auto it = a.find(n.index);
      if (it == a.end()) throw UnassignedGeneratorError(n.index);
      return it->second;
    }
    case Expr::Kind::Scale:
      return n.scalar * evaluate_scalar(n.args[0], a);
    case Expr::Kind::Add:
      return evaluate_scalar(n.args[0], a) + evaluate_scalar(n.args[1], a);
    case Expr::Kind::Sup:
      return std::max(evaluate_scalar(n.args[0], a), evaluate_scalar(n.args[1], a));
    case Expr::Kind::Inf:
      return std::min(evaluate_scalar(n.args[0], a), evaluate_scalar(n.args[1], a));
    case Expr::Kind::Abs:
      return std::fabs(evaluate_scalar(n.args[0], a));
    case Expr::Kind::Pos:
      return std::max(evaluate_scalar(n.args[0], a), 0.0);
    case Expr::Kind::PowerSum: {
      double acc = 0.0;
      for (const Expr& c : n.args) {
        const double v = std::fabs(evaluate_scalar(c, a));
        if (v > 0.0) acc += std::pow(v, n.scalar);
      }
      return acc > 0.0 ? std::pow(acc, 1.0 / n.scalar) : 0.0;
    }
  }
  throw Error("corrupt expression node");
}

/// Evaluates an expression at a vector assignment, coordinate by coordinate.
/// This is the functional-calculus evaluation: by positive homogeneity the
/// value of the expression on lattice elements is computed pointwise, with
/// exactly the same floating-point operations as evaluate_scalar.
inline std::vector<double> evaluate_lattice(const Expr& e, const LatticeAssignment& a) {
  if (a.empty()) throw ParameterError("lattice assignment is empty");
  const std::size_t dim = a.begin()->second.size();
  for (const auto& [idx, vec] : a) {
    if (vec.size() != dim)
      throw DimensionError("assignment vectors have mixed dimensions (generator " +
                           std::to_string(idx) + ")");
  }
  std::vector<double> out(dim);
  ScalarAssignment slice;
  for (std::size_t j = 0; j < dim; ++j) {
    slice.clear();
    for (const auto& [idx, vec] : a) slice[idx] = vec[j];
    out[j] = evaluate_scalar(e, slice);
  }
  return out;
}

/// λ·f for λ >= 0. Rescaling with a negative λ is not a lattice homomorphism
/// operation, so it is rejected here; negative coefficients enter expressions
/// only through linear combinations (Expr::scale / Expr::sub).
inline Expr scale_expr(const Expr& e, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ParameterError("scale_expr requires a finite lambda >= 0");
  return Expr::scale(lambda, e);
}

// --- textual form ----------------------------------------------------------
//
// Prefix notation, one operator per parenthesized group:
//
//   (pos (sub (abs (gen 2)) (scale 16 (add (abs (gen 0)) (abs (gen 1))))))
//
// Operators: gen, scale, add, sub, neg, sup, inf, abs, pos, psum.
// add/sup/inf accept two or more children (folded left); psum takes the
// exponent first, then one or more children. Numbers are plain C doubles.

namespace detail {

inline void print_double(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& why) {
    throw ParseError("expression parse error at offset " + std::to_string(pos) + ": " + why);
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  std::string token() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    if (pos == start) fail("expected a token");
    return std::string(text.substr(start, pos - start));
  }

  double number() {
    const std::string t = token();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail("'" + t + "' is not a number");
    }
  }

  bool at_close() {
    skip_ws();
    return pos < text.size() && text[pos] == ')';
  }

  Expr parse_expr() {
    expect('(');
    const std::string op = token();
    Expr result = [&]() -> Expr {
      if (op == "gen") {
        const double idx = number();
        if (idx != std::floor(idx) || idx < 0) fail("gen index must be a nonnegative integer");
        return Expr::gen(static_cast<int>(idx));
      }
      if (op == "scale") {
        const double c = number();
        return Expr::scale(c, parse_expr());
      }
      if (op == "neg") return Expr::scale(-1.0, parse_expr());
      if (op == "abs") return Expr::abs(parse_expr());
      if (op == "pos") return Expr::pos(parse_expr());
      if (op == "sub") {
        Expr a = parse_expr();
        Expr b = parse_expr();
        return Expr::sub(std::move(a), std::move(b));
      }
      if (op == "add" || op == "sup" || op == "inf") {
        Expr acc = parse_expr();
        if (at_close()) fail("'" + op + "' needs at least two children");
        do {
          Expr next = parse_expr();
          if (op == "add")
            acc = Expr::add(std::move(acc), std::move(next));
          else if (op == "sup")
            acc = Expr::sup(std::move(acc), std::move(next));
          else
            acc = Expr::inf(std::move(acc), std::move(next));
        } while (!at_close());
        return acc;
      }
      if (op == "psum") {
        const double s = number();
        std::vector<Expr> children;
        while (!at_close()) children.push_back(parse_expr());
        if (children.empty()) fail("psum needs at least one child");
        return Expr::power_sum(s, std::move(children));
      }
      fail("unknown operator '" + op + "'");
    }();
    expect(')');
    return result;
  }
};

}  // namespace detail

inline Expr parse_expr(std::string_view text) {
  detail::Parser p{text};
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input after expression");
  return e;
}

/// Canonical textual form; parse_expr(print_expr(e)) evaluates identically
/// to e. Parser sugar (sub/neg, n-ary folds) prints in its lowered shape.
inline std::string print_expr(const Expr& e) {
  std::ostringstream os;
  const Expr::Node& n = e.node();
  switch (n.kind) {
    case Expr::Kind::Generator:
      os << "(gen " << n.index << ")";
      break;
    case Expr::Kind::Scale:
      os << "(scale ";
      detail::print_double(os, n.scalar);
      os << " " << print_expr(n.args[0]) << ")";
      break;
    case Expr::Kind::Add:
      os << "(add " << print_expr(n.args[0]) << " " << print_expr(n.args[1]) << ")";
      break;
    case Expr::Kind::Sup:
      os << "(sup " << print_expr(n.args[0]) << " " << print_expr(n.args[1]) << ")";
      break;
    case Expr::Kind::Inf:
      os << "(inf " << print_expr(n.args[0]) << " " << print_expr(n.args[1]) << ")";
      break;
    case Expr::Kind::Abs:
      os << "(abs " << print_expr(n.args[0]) << ")";
      break;
    case Expr::Kind::Pos:
      os << "(pos " << print_expr(n.args[0]) << ")";
      break;
    case Expr::Kind::PowerSum:
      os << "(psum ";
      detail::print_double(os, n.scalar);
      for (const Expr& c : n.args) os << " " << print_expr(c);
      os << ")";
      break;
  }
  return os.str();
}

}  // namespace freelat

#endif  // FREELAT_EXPR_HPP
