#pragma once

#include "lexv/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lexv {

enum class Sort { Bool, Int, Real };

std::string_view sort_name(Sort s);  // "Bool" | "Int" | "Real"
std::optional<Sort> parse_sort(std::string_view s);

/// A typed value. Int values hold an integral rational.
class Value {
 public:
  static Value boolean(bool b) { return Value(Sort::Bool, b, Rational(0)); }
  static Value integer(BigInt v) { return Value(Sort::Int, false, Rational(std::move(v))); }
  static Value real(Rational q) { return Value(Sort::Real, false, std::move(q)); }
  /// Zero of the sort: false / 0 / 0.0.
  static Value zero(Sort s) { return Value(s, false, Rational(0)); }

  Sort sort() const noexcept { return sort_; }
  bool as_bool() const noexcept { return boolean_; }
  const Rational& as_number() const noexcept { return number_; }

  /// "true" / "42" / "111.09"
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.sort_ == b.sort_ && a.boolean_ == b.boolean_ && a.number_ == b.number_;
  }

 private:
  Value(Sort s, bool b, Rational q) : sort_(s), boolean_(b), number_(std::move(q)) {}
  Sort sort_;
  bool boolean_;
  Rational number_;
};

using Assignment = std::map<std::string, Value>;

enum class Op {
  BoolLit, IntLit, DecimalLit, Var,
  Neg, Add, Sub, Mul, Div,
  Lt, Le, Gt, Ge, Eq, Ne,
  Not, And, Or, Implies, Iff, Ite,
};

/// Immutable expression tree with shared subterms.
class Expr {
 public:
  struct Node;

  Op op() const;
  const std::vector<Expr>& args() const;
  /// Variable name, or the literal's source text for DecimalLit.
  const std::string& text() const;
  bool bool_value() const;
  const Rational& number() const;

  bool is_literal() const;
  /// True when the subtree references no variables.
  bool is_constant() const;

  friend bool operator==(const Expr& a, const Expr& b);

  static Expr make(Op op, std::vector<Expr> args);
  static Expr bool_lit(bool b);
  static Expr int_lit(BigInt v);
  static Expr decimal_lit(std::string_view text);  // throws SortError when not a decimal
  static Expr decimal_lit(const Rational& q);
  static Expr var(std::string name);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Op op;
  std::vector<Expr> args;
  std::string text;
  bool boolean = false;
  Rational number;
};

// Terse builders.
namespace ex {
inline Expr t() { return Expr::bool_lit(true); }
inline Expr f() { return Expr::bool_lit(false); }
inline Expr i(long v) { return Expr::int_lit(v); }
inline Expr d(std::string_view s) { return Expr::decimal_lit(s); }
inline Expr v(std::string n) { return Expr::var(std::move(n)); }
inline Expr neg(Expr a) { return Expr::make(Op::Neg, {std::move(a)}); }
inline Expr add(std::vector<Expr> a) { return Expr::make(Op::Add, std::move(a)); }
inline Expr sub(Expr a, Expr b) { return Expr::make(Op::Sub, {std::move(a), std::move(b)}); }
inline Expr mul(Expr a, Expr b) { return Expr::make(Op::Mul, {std::move(a), std::move(b)}); }
inline Expr div(Expr a, Expr b) { return Expr::make(Op::Div, {std::move(a), std::move(b)}); }
inline Expr lt(Expr a, Expr b) { return Expr::make(Op::Lt, {std::move(a), std::move(b)}); }
inline Expr le(Expr a, Expr b) { return Expr::make(Op::Le, {std::move(a), std::move(b)}); }
inline Expr gt(Expr a, Expr b) { return Expr::make(Op::Gt, {std::move(a), std::move(b)}); }
inline Expr ge(Expr a, Expr b) { return Expr::make(Op::Ge, {std::move(a), std::move(b)}); }
inline Expr eq(Expr a, Expr b) { return Expr::make(Op::Eq, {std::move(a), std::move(b)}); }
inline Expr ne(Expr a, Expr b) { return Expr::make(Op::Ne, {std::move(a), std::move(b)}); }
inline Expr lnot(Expr a) { return Expr::make(Op::Not, {std::move(a)}); }
inline Expr land(std::vector<Expr> a) { return Expr::make(Op::And, std::move(a)); }
inline Expr lor(std::vector<Expr> a) { return Expr::make(Op::Or, std::move(a)); }
inline Expr implies(Expr a, Expr b) { return Expr::make(Op::Implies, {std::move(a), std::move(b)}); }
inline Expr iff(Expr a, Expr b) { return Expr::make(Op::Iff, {std::move(a), std::move(b)}); }
inline Expr ite(Expr c, Expr a, Expr b) {
  return Expr::make(Op::Ite, {std::move(c), std::move(a), std::move(b)});
}
}  // namespace ex

using SortEnv = std::map<std::string, Sort>;

/// Result of typechecking: the expression's sort, or a diagnostic.
struct TypeResult {
  std::optional<Sort> sort;
  std::vector<std::string> errors;
  std::vector<std::string> unknown_vars;
  bool ok() const { return sort.has_value() && errors.empty() && unknown_vars.empty(); }
};

/// Checks well-sortedness and the linearity rules (Mul needs a constant
/// operand; Div needs a nonzero constant divisor and Real sort). Bare integer
/// literals are promoted to Real where a Real operand is expected.
TypeResult typecheck(const Expr& e, const SortEnv& env);

/// Exact evaluation. Throws FreeVariableEncountered for the first unassigned
/// variable reached, DivisionByZero for a zero divisor. Variable divisors are
/// accepted here (the evaluator is more permissive than validation).
Value eval_expr(const Expr& e, const Assignment& a);

void collect_vars(const Expr& e, std::set<std::string>& out);
std::set<std::string> vars_of(const Expr& e);

/// S-expression rendering for diagnostics, e.g. "(and (>= x 2) y)".
std::string to_string(const Expr& e);

std::string_view op_name(Op op);

}  // namespace lexv
