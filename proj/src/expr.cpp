#include "lexv/expr.hpp"

#include "lexv/errors.hpp"

#include <sstream>

namespace lexv {

std::string_view sort_name(Sort s) {
  switch (s) {
    case Sort::Bool: return "Bool";
    case Sort::Int: return "Int";
    case Sort::Real: return "Real";
  }
  return "?";
}

std::optional<Sort> parse_sort(std::string_view s) {
  if (s == "Bool" || s == "BOOL" || s == "bool") return Sort::Bool;
  if (s == "Int" || s == "INT" || s == "int") return Sort::Int;
  if (s == "Real" || s == "REAL" || s == "real") return Sort::Real;
  return std::nullopt;
}

std::string Value::to_string() const {
  switch (sort_) {
    case Sort::Bool: return boolean_ ? "true" : "false";
    case Sort::Int: return numerator(number_).str();
    case Sort::Real: return to_decimal(number_);
  }
  return "?";
}

// ---------------------------------------------------------------- Expr

Op Expr::op() const { return node_->op; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const std::string& Expr::text() const { return node_->text; }
bool Expr::bool_value() const { return node_->boolean; }
const Rational& Expr::number() const { return node_->number; }

bool Expr::is_literal() const {
  Op o = op();
  return o == Op::BoolLit || o == Op::IntLit || o == Op::DecimalLit;
}

bool Expr::is_constant() const {
  if (op() == Op::Var) return false;
  for (const auto& a : args())
    if (!a.is_constant()) return false;
  return true;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.args().size() != b.args().size()) return false;
  switch (a.op()) {
    case Op::BoolLit: return a.bool_value() == b.bool_value();
    case Op::IntLit:
    case Op::DecimalLit: return a.number() == b.number();
    case Op::Var: return a.text() == b.text();
    default: break;
  }
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!(a.args()[i] == b.args()[i])) return false;
  return true;
}

Expr Expr::make(Op op, std::vector<Expr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::bool_lit(bool b) {
  auto n = std::make_shared<Node>();
  n->op = Op::BoolLit;
  n->boolean = b;
  return Expr(std::move(n));
}

Expr Expr::int_lit(BigInt v) {
  auto n = std::make_shared<Node>();
  n->op = Op::IntLit;
  n->number = Rational(v);
  n->text = v.str();
  return Expr(std::move(n));
}

Expr Expr::decimal_lit(std::string_view text) {
  auto q = parse_decimal(text);
  if (!q) throw SortError("not a decimal literal: " + std::string(text));
  auto n = std::make_shared<Node>();
  n->op = Op::DecimalLit;
  n->number = *q;
  n->text = std::string(text);
  return Expr(std::move(n));
}

Expr Expr::decimal_lit(const Rational& q) { return decimal_lit(to_decimal(q)); }

Expr Expr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->text = std::move(name);
  return Expr(std::move(n));
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::BoolLit: return "bool";
    case Op::IntLit: return "int";
    case Op::DecimalLit: return "decimal";
    case Op::Var: return "var";
    case Op::Neg: return "-";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Iff: return "iff";
    case Op::Ite: return "ite";
  }
  return "?";
}

std::string to_string(const Expr& e) {
  switch (e.op()) {
    case Op::BoolLit: return e.bool_value() ? "true" : "false";
    case Op::IntLit: return numerator(e.number()).str();
    case Op::DecimalLit: return to_decimal(e.number());
    case Op::Var: return e.text();
    default: break;
  }
  std::string s = "(";
  s += op_name(e.op());
  for (const auto& a : e.args()) {
    s += ' ';
    s += to_string(a);
  }
  s += ')';
  return s;
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.op() == Op::Var) {
    out.insert(e.text());
    return;
  }
  for (const auto& a : e.args()) collect_vars(a, out);
}

std::set<std::string> vars_of(const Expr& e) {
  std::set<std::string> out;
  collect_vars(e, out);
  return out;
}

// ---------------------------------------------------------------- typecheck

namespace {

struct Typed {
  std::optional<Sort> sort;
  bool promotable = false;  // bare integer literal (or negation of one)
};

class Checker {
 public:
  Checker(const SortEnv& env, TypeResult& out) : env_(env), out_(out) {}

  Typed check(const Expr& e) {
    switch (e.op()) {
      case Op::BoolLit: return {Sort::Bool, false};
      case Op::IntLit: return {Sort::Int, true};
      case Op::DecimalLit: return {Sort::Real, false};
      case Op::Var: {
        auto it = env_.find(e.text());
        if (it == env_.end()) {
          out_.unknown_vars.push_back(e.text());
          return {};
        }
        return {it->second, false};
      }
      case Op::Neg: {
        if (!arity(e, 1, 1)) return {};
        Typed t = check(e.args()[0]);
        if (t.sort && !numeric(*t.sort)) fail(e, "negation of non-numeric operand");
        return t;
      }
      case Op::Add:
      case Op::Sub: {
        if (!arity(e, e.op() == Op::Sub ? 2 : 1, SIZE_MAX)) return {};
        return {unify_numeric(e, e.args()), false};
      }
      case Op::Mul: {
        if (!arity(e, 2, 2)) return {};
        if (!e.args()[0].is_constant() && !e.args()[1].is_constant())
          fail(e, "nonlinear multiplication (one operand must be a constant)");
        return {unify_numeric(e, e.args()), false};
      }
      case Op::Div: {
        if (!arity(e, 2, 2)) return {};
        const Expr& den = e.args()[1];
        if (!den.is_constant()) {
          fail(e, "division by a non-constant divisor");
        } else {
          try {
            if (eval_expr(den, {}).as_number() == 0) fail(e, "division by zero constant");
          } catch (const Error&) {
            fail(e, "division by zero constant");
          }
        }
        auto s = unify_numeric(e, e.args());
        if (s && *s != Sort::Real) fail(e, "division requires Real operands");
        return {Sort::Real, false};
      }
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge: {
        if (!arity(e, 2, 2)) return {};
        unify_numeric(e, e.args());
        return {Sort::Bool, false};
      }
      case Op::Eq:
      case Op::Ne: {
        if (!arity(e, 2, 2)) return {};
        Typed a = check(e.args()[0]);
        Typed b = check(e.args()[1]);
        if (a.sort && b.sort) {
          if (*a.sort == Sort::Bool || *b.sort == Sort::Bool) {
            if (*a.sort != *b.sort) fail(e, "equality between Bool and numeric operands");
          } else {
            unify_pair(e, a, b);
          }
        }
        return {Sort::Bool, false};
      }
      case Op::Not:
        if (!arity(e, 1, 1)) return {};
        expect_bool(e, e.args());
        return {Sort::Bool, false};
      case Op::And:
      case Op::Or:
        if (!arity(e, 1, SIZE_MAX)) return {};
        expect_bool(e, e.args());
        return {Sort::Bool, false};
      case Op::Implies:
      case Op::Iff:
        if (!arity(e, 2, 2)) return {};
        expect_bool(e, e.args());
        return {Sort::Bool, false};
      case Op::Ite: {
        if (!arity(e, 3, 3)) return {};
        Typed c = check(e.args()[0]);
        if (c.sort && *c.sort != Sort::Bool) fail(e, "ite condition must be Bool");
        Typed a = check(e.args()[1]);
        Typed b = check(e.args()[2]);
        if (!a.sort || !b.sort) return {};
        if (*a.sort == Sort::Bool || *b.sort == Sort::Bool) {
          if (*a.sort != *b.sort) fail(e, "ite branches have different sorts");
          return {Sort::Bool, false};
        }
        auto s = unify_pair(e, a, b);
        return {s, a.promotable && b.promotable};
      }
    }
    return {};
  }

 private:
  static bool numeric(Sort s) { return s == Sort::Int || s == Sort::Real; }

  void fail(const Expr& e, const std::string& msg) {
    out_.errors.push_back(msg + " in " + to_string(e));
  }

  bool arity(const Expr& e, std::size_t lo, std::size_t hi) {
    auto n = e.args().size();
    if (n < lo || n > hi) {
      fail(e, "wrong number of operands for '" + std::string(op_name(e.op())) + "'");
      return false;
    }
    return true;
  }

  void expect_bool(const Expr& e, const std::vector<Expr>& args) {
    for (const auto& a : args) {
      Typed t = check(a);
      if (t.sort && *t.sort != Sort::Bool) fail(e, "logical connective over non-Bool operand");
    }
  }

  std::optional<Sort> unify_pair(const Expr& e, const Typed& a, const Typed& b) {
    return unify(e, {a, b});
  }

  std::optional<Sort> unify_numeric(const Expr& e, const std::vector<Expr>& args) {
    std::vector<Typed> ts;
    for (const auto& a : args) ts.push_back(check(a));
    return unify(e, ts);
  }

  // Non-literal operands must agree; literals follow them. A lone DecimalLit
  // fixes Real; bare integer literals adopt whatever sort is required.
  std::optional<Sort> unify(const Expr& e, const std::vector<Typed>& ts) {
    std::optional<Sort> fixed;
    bool all_known = true;
    for (const auto& t : ts) {
      if (!t.sort) {
        all_known = false;
        continue;
      }
      if (!numeric(*t.sort)) {
        fail(e, "arithmetic or comparison over non-numeric operand");
        return std::nullopt;
      }
      if (t.promotable) continue;
      if (fixed && *fixed != *t.sort) {
        fail(e, "mixed Int and Real operands");
        return std::nullopt;
      }
      fixed = t.sort;
    }
    if (!all_known) return fixed;
    return fixed.value_or(Sort::Int);
  }

  const SortEnv& env_;
  TypeResult& out_;
};

}  // namespace

TypeResult typecheck(const Expr& e, const SortEnv& env) {
  TypeResult out;
  Checker c(env, out);
  Typed t = c.check(e);
  out.sort = t.sort;
  return out;
}

// ---------------------------------------------------------------- eval

namespace {

Value number_of(Sort s, Rational q) {
  return s == Sort::Real ? Value::real(std::move(q)) : Value::integer(numerator(q));
}

Sort join(const Value& a, const Value& b) {
  return (a.sort() == Sort::Real || b.sort() == Sort::Real) ? Sort::Real : Sort::Int;
}

bool compare(Op op, const Value& a, const Value& b) {
  if (a.sort() == Sort::Bool || b.sort() == Sort::Bool) {
    if (a.sort() != b.sort()) throw SortError("comparison between Bool and numeric values");
    bool eq = a.as_bool() == b.as_bool();
    if (op == Op::Eq) return eq;
    if (op == Op::Ne) return !eq;
    throw SortError("ordering comparison over Bool values");
  }
  const Rational& x = a.as_number();
  const Rational& y = b.as_number();
  switch (op) {
    case Op::Lt: return x < y;
    case Op::Le: return x <= y;
    case Op::Gt: return x > y;
    case Op::Ge: return x >= y;
    case Op::Eq: return x == y;
    case Op::Ne: return x != y;
    default: break;
  }
  throw SortError("not a comparison");
}

bool truth(const Value& v) {
  if (v.sort() != Sort::Bool) throw SortError("expected Bool value");
  return v.as_bool();
}

}  // namespace

Value eval_expr(const Expr& e, const Assignment& a) {
  const auto& args = e.args();
  switch (e.op()) {
    case Op::BoolLit: return Value::boolean(e.bool_value());
    case Op::IntLit: return Value::integer(numerator(e.number()));
    case Op::DecimalLit: return Value::real(e.number());
    case Op::Var: {
      auto it = a.find(e.text());
      if (it == a.end()) throw FreeVariableEncountered(e.text());
      return it->second;
    }
    case Op::Neg: {
      Value v = eval_expr(args.at(0), a);
      return number_of(v.sort(), -v.as_number());
    }
    case Op::Add:
    case Op::Sub: {
      Value acc = eval_expr(args.at(0), a);
      if (acc.sort() == Sort::Bool) throw SortError("arithmetic over Bool");
      for (std::size_t i = 1; i < args.size(); ++i) {
        Value v = eval_expr(args[i], a);
        if (v.sort() == Sort::Bool) throw SortError("arithmetic over Bool");
        Rational q = e.op() == Op::Add ? acc.as_number() + v.as_number()
                                       : acc.as_number() - v.as_number();
        acc = number_of(join(acc, v), std::move(q));
      }
      return acc;
    }
    case Op::Mul: {
      Value x = eval_expr(args.at(0), a);
      Value y = eval_expr(args.at(1), a);
      return number_of(join(x, y), x.as_number() * y.as_number());
    }
    case Op::Div: {
      Value x = eval_expr(args.at(0), a);
      Value y = eval_expr(args.at(1), a);
      if (y.as_number() == 0) throw DivisionByZero();
      return Value::real(x.as_number() / y.as_number());
    }
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::Ne:
      return Value::boolean(compare(e.op(), eval_expr(args.at(0), a), eval_expr(args.at(1), a)));
    case Op::Not: return Value::boolean(!truth(eval_expr(args.at(0), a)));
    case Op::And:
      for (const auto& x : args)
        if (!truth(eval_expr(x, a))) return Value::boolean(false);
      return Value::boolean(true);
    case Op::Or:
      for (const auto& x : args)
        if (truth(eval_expr(x, a))) return Value::boolean(true);
      return Value::boolean(false);
    case Op::Implies:
      if (!truth(eval_expr(args.at(0), a))) return Value::boolean(true);
      return Value::boolean(truth(eval_expr(args.at(1), a)));
    case Op::Iff:
      return Value::boolean(truth(eval_expr(args.at(0), a)) == truth(eval_expr(args.at(1), a)));
    case Op::Ite:
      return truth(eval_expr(args.at(0), a)) ? eval_expr(args.at(1), a) : eval_expr(args.at(2), a);
  }
  throw UnsupportedExpr("unknown operator");
}

}  // namespace lexv
