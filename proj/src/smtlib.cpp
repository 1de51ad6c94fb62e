#include "lexv/smtlib.hpp"

#include "lexv/errors.hpp"
#include "lexv/sexpr.hpp"

#include <sstream>

namespace lexv {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Consistency: return "CONSISTENCY";
    case Mode::Illegality: return "ILLEGALITY";
    case Mode::Hardened: return "HARDENED";
    case Mode::Relaxation: return "RELAXATION";
  }
  return "?";
}

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Sat: return "sat";
    case Status::Unsat: return "unsat";
    case Status::Unknown: return "unknown";
  }
  return "unknown";
}

std::string emit_number(const Rational& q, Sort sort) {
  const bool neg = q < 0;
  const Rational a = neg ? Rational(-q) : q;
  std::string body;
  if (sort == Sort::Int) {
    if (!is_integral(a)) throw UnsupportedExpr("non-integral Int literal " + to_decimal(q));
    body = numerator(a).str();
  } else if (is_integral(a)) {
    body = numerator(a).str() + ".0";
  } else {
    body = "(/ " + numerator(a).str() + " " + denominator(a).str() + ")";
  }
  return neg ? "(- " + body + ")" : body;
}

namespace {

struct Inferred {
  Sort sort = Sort::Int;
  bool promotable = false;
};

class Emitter {
 public:
  explicit Emitter(const SortEnv& env) : env_(env) {}

  Inferred infer(const Expr& e) const {
    switch (e.op()) {
      case Op::BoolLit: return {Sort::Bool, false};
      case Op::IntLit: return {Sort::Int, true};
      case Op::DecimalLit: return {Sort::Real, false};
      case Op::Var: {
        auto it = env_.find(e.text());
        if (it == env_.end()) throw UnsupportedExpr("undeclared variable " + e.text());
        return {it->second, false};
      }
      case Op::Neg: return infer(e.args()[0]);
      case Op::Add:
      case Op::Sub:
      case Op::Mul: return {unified(e.args()), all_promotable(e.args())};
      case Op::Div: return {Sort::Real, false};
      case Op::Ite: {
        Inferred a = infer(e.args()[1]);
        if (a.sort == Sort::Bool) return a;
        return {unified({e.args()[1], e.args()[2]}), a.promotable && infer(e.args()[2]).promotable};
      }
      default: return {Sort::Bool, false};
    }
  }

  std::string emit(const Expr& e, std::optional<Sort> ctx = std::nullopt) const {
    const auto& args = e.args();
    switch (e.op()) {
      case Op::BoolLit: return e.bool_value() ? "true" : "false";
      case Op::IntLit: return emit_number(e.number(), ctx.value_or(Sort::Int));
      case Op::DecimalLit:
        if (ctx == Sort::Int) throw UnsupportedExpr("decimal literal in Int context: " + e.text());
        return emit_number(e.number(), Sort::Real);
      case Op::Var: return e.text();
      case Op::Neg: {
        Sort s = ctx.value_or(infer(e).sort);
        if (args[0].op() == Op::IntLit || args[0].op() == Op::DecimalLit)
          return emit_number(-args[0].number(), s);
        return "(- " + emit(args[0], s) + ")";
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul: {
        if (e.op() == Op::Mul && !args[0].is_constant() && !args[1].is_constant())
          throw UnsupportedExpr("nonlinear multiplication: " + to_string(e));
        Sort s = ctx.value_or(unified(args));
        if (args.size() == 1) return emit(args[0], s);
        return nary(op_symbol(e.op()), args, s);
      }
      case Op::Div: {
        if (!args[1].is_constant()) throw UnsupportedExpr("non-constant divisor: " + to_string(e));
        return nary("/", args, Sort::Real);
      }
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
        return nary(op_symbol(e.op()), args, unified(args));
      case Op::Eq:
      case Op::Ne: {
        Inferred a = infer(args[0]);
        std::optional<Sort> s;
        if (a.sort != Sort::Bool) s = unified(args);
        return nary(e.op() == Op::Eq ? "=" : "distinct", args, s);
      }
      case Op::Iff: return nary("=", args, std::nullopt);
      case Op::Not: return "(not " + emit(args[0]) + ")";
      case Op::And:
      case Op::Or:
        if (args.size() == 1) return emit(args[0]);
        return nary(e.op() == Op::And ? "and" : "or", args, std::nullopt);
      case Op::Implies: return nary("=>", args, std::nullopt);
      case Op::Ite: {
        Inferred t = infer(e);
        std::optional<Sort> s;
        if (t.sort != Sort::Bool) s = ctx.value_or(t.sort);
        return "(ite " + emit(args[0]) + " " + emit(args[1], s) + " " + emit(args[2], s) + ")";
      }
    }
    throw UnsupportedExpr("unknown operator");
  }

 private:
  static std::string op_symbol(Op op) {
    switch (op) {
      case Op::Add: return "+";
      case Op::Sub: return "-";
      case Op::Mul: return "*";
      case Op::Lt: return "<";
      case Op::Le: return "<=";
      case Op::Gt: return ">";
      case Op::Ge: return ">=";
      default: return "?";
    }
  }

  std::string nary(const std::string& head, const std::vector<Expr>& args, std::optional<Sort> s) const {
    std::string out = "(" + head;
    for (const auto& a : args) out += " " + emit(a, s);
    return out + ")";
  }

  bool all_promotable(const std::vector<Expr>& args) const {
    for (const auto& a : args)
      if (!infer(a).promotable) return false;
    return true;
  }

  Sort unified(const std::vector<Expr>& args) const {
    std::optional<Sort> lit;
    for (const auto& a : args) {
      Inferred t = infer(a);
      if (!t.promotable) return t.sort;
      if (t.sort == Sort::Real) lit = Sort::Real;
    }
    return lit.value_or(Sort::Int);
  }

  const SortEnv& env_;
};

}  // namespace

std::string emit_expr(const Expr& e, const SortEnv& env) { return Emitter(env).emit(e); }

SmtScript emit_script(const ConstraintBundle& b, Mode mode, const EmitOptions& opts) {
  SmtScript s;
  s.mode = mode;
  Query q = opts.query;
  if (q == Query::Default)
    q = (mode == Mode::Consistency || mode == Mode::Relaxation) ? Query::Model : Query::Core;
  s.query = q;

  const SortEnv env = b.sort_env();
  Emitter em(env);
  const bool pin = mode == Mode::Illegality || opts.pin_penalty;

  std::ostringstream out;
  out << "(set-option :produce-models true)\n";
  out << "(set-option :produce-unsat-cores true)\n";
  out << "(set-logic QF_LIRA)\n";
  for (const auto& v : b.vars) {
    out << "(declare-fun " << v.name << " () " << sort_name(v.sort) << ")\n";
    s.decls.emplace(v.name, v.sort);
  }

  std::vector<std::pair<std::string, const Constraint*>> relaxed;
  if (mode == Mode::Relaxation) {
    std::size_t idx = 0;
    for (const auto& c : b.constraints) {
      if (!c.soft() || opts.exclude.count(c.id)) continue;
      std::string sel = "lexv_sel_" + std::to_string(idx++);
      out << "(declare-fun " << sel << " () Bool)\n";
      s.decls.emplace(sel, Sort::Bool);
      s.selectors.emplace(sel, c.id);
      relaxed.emplace_back(sel, &c);
    }
  }

  auto assert_named = [&](const std::string& formula, const std::string& name, Tracked t) {
    out << "(assert (! " << formula << " :named " << name << "))\n";
    s.name_map.emplace(name, std::move(t));
  };

  std::size_t next_relaxed = 0;
  for (const auto& c : b.constraints) {
    if (opts.exclude.count(c.id)) continue;
    if (c.soft() && mode == Mode::Consistency) continue;
    const Origin origin = c.hard() ? Origin::Hard : Origin::Soft;
    std::string formula = em.emit(c.expr);
    if (c.soft() && mode == Mode::Relaxation) {
      formula = "(or " + formula + " " + relaxed[next_relaxed++].first + ")";
    }
    assert_named(formula, c.id, {c.id, c.group, origin});
  }

  if (pin) {
    assert_named(em.emit(penalty_free(b)), std::string(kPinName),
                 {std::string(kPinName), std::string(kPinGroup), Origin::Pin});
  }

  if (mode == Mode::Relaxation && opts.cost_bound && !relaxed.empty()) {
    std::vector<std::string> terms;
    for (const auto& [sel, c] : relaxed) {
      long w = c->weight;
      if (auto it = opts.weights.find(c->id); it != opts.weights.end()) w = it->second;
      std::string t = "(ite " + sel + " 1 0)";
      terms.push_back(w == 1 ? t : "(* " + std::to_string(w) + " " + t + ")");
    }
    std::string sum = terms.size() == 1 ? terms[0] : [&] {
      std::string acc = "(+";
      for (const auto& t : terms) acc += " " + t;
      return acc + ")";
    }();
    assert_named("(<= " + sum + " " + emit_number(*opts.cost_bound, Sort::Int) + ")",
                 std::string(kBoundName), {std::string(kBoundName), "meta:cost_bound", Origin::Bound});
  }

  out << "(check-sat)\n";
  out << (q == Query::Model ? "(get-model)\n" : "(get-unsat-core)\n");
  s.text = out.str();
  return s;
}

// ---------------------------------------------------------------- replies

namespace {

Rational numeric_term(const SExpr& t) {
  if (t.is_atom()) {
    auto q = parse_decimal(t.text);
    if (!q) throw ProtocolError("unreadable model value", t.to_string());
    return *q;
  }
  if (!t.is_list() || t.items.empty() || !t.items[0].is_atom())
    throw ProtocolError("unreadable model value", t.to_string());
  const std::string& head = t.items[0].text;
  if (head == "-" && t.items.size() == 2) return -numeric_term(t.items[1]);
  if (head == "-" && t.items.size() == 3) return numeric_term(t.items[1]) - numeric_term(t.items[2]);
  if (head == "/" && t.items.size() == 3) {
    Rational d = numeric_term(t.items[2]);
    if (d == 0) throw ProtocolError("division by zero in model value", t.to_string());
    return numeric_term(t.items[1]) / d;
  }
  if ((head == "to_real" || head == "to_int") && t.items.size() == 2) return numeric_term(t.items[1]);
  throw ProtocolError("unsupported model value", t.to_string());
}

[[noreturn]] void protocol(const std::string& what, const std::string& raw) {
  throw ProtocolError(what, raw.substr(0, 400));
}

}  // namespace

Value parse_model_value(const SExpr& term, Sort sort) {
  if (sort == Sort::Bool) {
    if (term.is_atom("true")) return Value::boolean(true);
    if (term.is_atom("false")) return Value::boolean(false);
    throw ProtocolError("expected Bool model value", term.to_string());
  }
  Rational q = numeric_term(term);
  if (sort == Sort::Int) {
    if (!is_integral(q)) throw ProtocolError("non-integral Int model value", term.to_string());
    return Value::integer(numerator(q));
  }
  return Value::real(q);
}

SolverReply parse_reply(const std::string& raw, const SmtScript& script) {
  SolverReply r;
  r.raw = raw;
  std::vector<SExpr> items = parse_sexprs(raw);
  std::size_t i = 0;
  while (i < items.size() && items[i].is_atom("success")) ++i;
  if (i >= items.size()) protocol("empty solver response", raw);

  auto is_error = [](const SExpr& e) {
    return e.is_list() && !e.items.empty() && e.items[0].is_atom("error");
  };
  if (is_error(items[i])) protocol("solver reported an error", items[i].to_string());

  const SExpr& st = items[i++];
  if (st.is_atom("sat")) {
    r.status = Status::Sat;
  } else if (st.is_atom("unsat")) {
    r.status = Status::Unsat;
  } else if (st.is_atom("unknown")) {
    r.status = Status::Unknown;
    return r;
  } else {
    protocol("expected sat/unsat/unknown", raw);
  }

  const bool answered = (r.status == Status::Sat && script.query == Query::Model) ||
                        (r.status == Status::Unsat && script.query == Query::Core);
  if (!answered) {
    // The query does not apply to this outcome; solvers answer it with an
    // error, which is expected here. Anything else is not.
    for (; i < items.size(); ++i)
      if (!is_error(items[i])) protocol("unexpected trailing output", items[i].to_string());
    return r;
  }
  if (i < items.size() && is_error(items[i])) protocol("solver reported an error", items[i].to_string());

  if (r.status == Status::Sat) {
    if (i >= items.size() || !items[i].is_list()) protocol("missing model after sat", raw);
    const SExpr& m = items[i];
    std::size_t start = (!m.items.empty() && m.items[0].is_atom("model")) ? 1 : 0;
    Assignment model;
    for (std::size_t k = start; k < m.items.size(); ++k) {
      const SExpr& d = m.items[k];
      if (!d.is_list() || d.items.size() != 5 || !d.items[0].is_atom("define-fun"))
        protocol("malformed model entry", d.to_string());
      const std::string& name = d.items[1].text;
      auto decl = script.decls.find(name);
      if (decl == script.decls.end()) continue;  // solver-internal symbol
      if (!d.items[2].is_list() || !d.items[2].items.empty()) continue;  // function, not constant
      model.insert_or_assign(name, parse_model_value(d.items[4], decl->second));
    }
    for (const auto& [name, sort] : script.decls)
      if (!model.count(name)) model.emplace(name, Value::zero(sort));
    r.model = std::move(model);
  } else {
    if (i >= items.size() || !items[i].is_list()) protocol("missing unsat core after unsat", raw);
    std::vector<CoreMember> core;
    for (const auto& n : items[i].items) {
      if (!n.is_atom()) protocol("malformed unsat core", items[i].to_string());
      auto t = script.name_map.find(n.text);
      if (t == script.name_map.end()) protocol("core names an unknown assertion '" + n.text + "'", raw);
      core.push_back({n.text, t->second.constraint_id, t->second.group, t->second.origin});
    }
    r.core = std::move(core);
  }
  return r;
}

}  // namespace lexv
