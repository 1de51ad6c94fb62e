#include "lexv/bundle.hpp"

#include "lexv/errors.hpp"

#include <algorithm>
#include <cctype>

namespace lexv {

const VarDecl* ConstraintBundle::find_var(std::string_view name) const {
  for (const auto& v : vars)
    if (v.name == name) return &v;
  return nullptr;
}

const Constraint* ConstraintBundle::find_constraint(std::string_view id) const {
  for (const auto& c : constraints)
    if (c.id == id) return &c;
  return nullptr;
}

Constraint* ConstraintBundle::find_constraint(std::string_view id) {
  for (auto& c : constraints)
    if (c.id == id) return &c;
  return nullptr;
}

SortEnv ConstraintBundle::sort_env() const {
  SortEnv env;
  for (const auto& v : vars) env.emplace(v.name, v.sort);
  return env;
}

std::vector<const Constraint*> ConstraintBundle::hard() const {
  std::vector<const Constraint*> out;
  for (const auto& c : constraints)
    if (c.hard()) out.push_back(&c);
  return out;
}

std::vector<const Constraint*> ConstraintBundle::soft() const {
  std::vector<const Constraint*> out;
  for (const auto& c : constraints)
    if (c.soft()) out.push_back(&c);
  return out;
}

long ConstraintBundle::total_soft_weight() const {
  long w = 0;
  for (const auto& c : constraints)
    if (c.soft()) w += c.weight;
  return w;
}

std::string_view code_name(ValidationCode c) {
  switch (c) {
    case ValidationCode::UnknownVariable: return "UnknownVariable";
    case ValidationCode::SortMismatch: return "SortMismatch";
    case ValidationCode::NonLinear: return "NonLinear";
    case ValidationCode::DuplicateVariable: return "DuplicateVariable";
    case ValidationCode::DuplicateId: return "DuplicateId";
    case ValidationCode::NameClash: return "NameClash";
    case ValidationCode::InvalidIdentifier: return "InvalidIdentifier";
    case ValidationCode::NonpositiveWeight: return "NonpositiveWeight";
    case ValidationCode::WeightOnHard: return "WeightOnHard";
    case ValidationCode::MissingPenaltyVar: return "MissingPenaltyVar";
    case ValidationCode::BadPenaltySort: return "BadPenaltySort";
    case ValidationCode::NoHardConstraint: return "NoHardConstraint";
    case ValidationCode::NonBoolConstraint: return "NonBoolConstraint";
    case ValidationCode::BadFact: return "BadFact";
  }
  return "?";
}

namespace {

const std::set<std::string, std::less<>>& reserved_words() {
  static const std::set<std::string, std::less<>> words = {
      "and", "or", "not", "ite", "true", "false", "let", "forall", "exists",
      "assert", "distinct", "div", "mod", "abs", "to_real", "to_int", "is_int",
      "par", "as", "_", "!", "BINARY", "DECIMAL", "HEXADECIMAL", "NUMERAL", "STRING",
      "Bool", "Int", "Real", "xor", "match"};
  return words;
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || s.size() > 128) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (!(std::isalnum(c) || c == '_' || c == '.')) return false;
  }
  if (s.rfind("lexv_", 0) == 0) return false;
  return reserved_words().find(s) == reserved_words().end();
}

std::vector<ValidationError> validate_bundle(const ConstraintBundle& b) {
  std::vector<ValidationError> errs;
  auto add = [&](ValidationCode code, std::string subject, std::string msg) {
    errs.push_back({code, std::move(subject), std::move(msg)});
  };

  std::set<std::string> var_names;
  for (const auto& v : b.vars) {
    if (!is_identifier(v.name)) add(ValidationCode::InvalidIdentifier, v.name, "invalid variable name");
    if (!var_names.insert(v.name).second)
      add(ValidationCode::DuplicateVariable, v.name, "variable declared twice");
  }
  SortEnv env = b.sort_env();

  std::set<std::string> ids;
  bool any_hard = false;
  for (const auto& c : b.constraints) {
    if (!is_identifier(c.id)) add(ValidationCode::InvalidIdentifier, c.id, "invalid constraint id");
    if (!ids.insert(c.id).second) add(ValidationCode::DuplicateId, c.id, "constraint id used twice");
    if (var_names.count(c.id)) add(ValidationCode::NameClash, c.id, "constraint id equals a variable name");
    if (c.hard()) {
      any_hard = true;
      if (c.weight != 0) add(ValidationCode::WeightOnHard, c.id, "HARD constraint carries a weight");
    } else if (c.weight < 1) {
      add(ValidationCode::NonpositiveWeight, c.id, "SOFT weight must be >= 1");
    }

    TypeResult tr = typecheck(c.expr, env);
    for (const auto& u : tr.unknown_vars)
      add(ValidationCode::UnknownVariable, u, "undeclared variable in constraint " + c.id);
    for (const auto& m : tr.errors) {
      bool nonlinear = m.find("nonlinear") != std::string::npos ||
                       m.find("divisor") != std::string::npos ||
                       m.find("division by zero") != std::string::npos;
      add(nonlinear ? ValidationCode::NonLinear : ValidationCode::SortMismatch, c.id, m);
    }
    if (tr.sort && *tr.sort != Sort::Bool)
      add(ValidationCode::NonBoolConstraint, c.id, "constraint expression is not Bool");
  }
  if (!any_hard) add(ValidationCode::NoHardConstraint, b.case_id, "bundle has no HARD constraint");

  const VarDecl* p = b.penalty_var.empty() ? nullptr : b.find_var(b.penalty_var);
  if (!p) {
    add(ValidationCode::MissingPenaltyVar, b.penalty_var, "penalty_var is not a declared variable");
  } else if (p->sort == Sort::Real) {
    add(ValidationCode::BadPenaltySort, p->name, "penalty_var must be Bool or Int (0/1)");
  }

  for (const auto& [name, value] : b.facts) {
    const VarDecl* v = b.find_var(name);
    if (!v) {
      add(ValidationCode::BadFact, name, "fact for undeclared variable");
    } else if (v->sort != value.sort()) {
      add(ValidationCode::BadFact, name, "fact value sort does not match declaration");
    }
  }
  return errs;
}

void require_valid(const ConstraintBundle& b) {
  auto errs = validate_bundle(b);
  if (errs.empty()) return;
  std::vector<std::string> details;
  for (const auto& e : errs)
    details.push_back(std::string(code_name(e.code)) + "(" + e.subject + "): " + e.message);
  throw InvalidBundle("bundle '" + b.case_id + "' failed validation", std::move(details));
}

std::optional<FactLiteral> fact_literal(const Constraint& c, const SortEnv& env) {
  if (!c.soft()) return std::nullopt;
  const Expr& e = c.expr;
  auto sort_of = [&](const std::string& n) -> std::optional<Sort> {
    auto it = env.find(n);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  if (e.op() == Op::Var) {
    if (sort_of(e.text()) == Sort::Bool) return FactLiteral{e.text(), Value::boolean(true)};
    return std::nullopt;
  }
  if (e.op() == Op::Not && e.args()[0].op() == Op::Var) {
    const auto& n = e.args()[0].text();
    if (sort_of(n) == Sort::Bool) return FactLiteral{n, Value::boolean(false)};
    return std::nullopt;
  }
  if (e.op() != Op::Eq) return std::nullopt;
  const Expr* var = nullptr;
  const Expr* lit = nullptr;
  for (const auto& a : e.args()) {
    if (a.op() == Op::Var) var = &a;
    else if (a.is_constant()) lit = &a;
  }
  if (!var || !lit) return std::nullopt;
  auto s = sort_of(var->text());
  if (!s) return std::nullopt;
  try {
    Value v = eval_expr(*lit, {});
    if (*s == Sort::Bool) {
      if (v.sort() != Sort::Bool) return std::nullopt;
      return FactLiteral{var->text(), v};
    }
    if (v.sort() == Sort::Bool) return std::nullopt;
    if (*s == Sort::Int) {
      if (!is_integral(v.as_number())) return std::nullopt;
      return FactLiteral{var->text(), Value::integer(numerator(v.as_number()))};
    }
    return FactLiteral{var->text(), Value::real(v.as_number())};
  } catch (const Error&) {
    return std::nullopt;
  }
}

Assignment asserted_facts(const ConstraintBundle& b) {
  Assignment out = b.facts;
  SortEnv env = b.sort_env();
  for (const auto& c : b.constraints)
    if (auto f = fact_literal(c, env)) out.insert_or_assign(f->var, f->value);
  return out;
}

namespace {

Expr literal_of(const Value& v) {
  switch (v.sort()) {
    case Sort::Bool: return Expr::bool_lit(v.as_bool());
    case Sort::Int: return Expr::int_lit(numerator(v.as_number()));
    case Sort::Real: return Expr::decimal_lit(v.as_number());
  }
  return Expr::bool_lit(false);
}

}  // namespace

void expand_facts(ConstraintBundle& b, long weight) {
  SortEnv env = b.sort_env();
  std::set<std::string> pinned;
  for (const auto& c : b.constraints)
    if (auto f = fact_literal(c, env)) pinned.insert(f->var);
  for (const auto& [name, value] : b.facts) {
    if (pinned.count(name)) continue;
    Constraint c;
    c.id = "fact_" + name;
    c.kind = Kind::Soft;
    c.weight = weight;
    c.group = "fact:" + name;
    c.expr = ex::eq(Expr::var(name), literal_of(value));
    b.constraints.push_back(std::move(c));
  }
}

std::set<std::string> defined_variables(const ConstraintBundle& b) {
  std::set<std::string> out;
  for (const auto& c : b.constraints) {
    if (!c.hard()) continue;
    const Expr& e = c.expr;
    if (e.op() != Op::Eq && e.op() != Op::Iff) continue;
    for (int side = 0; side < 2; ++side) {
      const Expr& lhs = e.args()[side];
      const Expr& rhs = e.args()[1 - side];
      if (lhs.op() == Op::Var && vars_of(rhs).count(lhs.text()) == 0)
        out.insert(lhs.text());
    }
  }
  return out;
}

std::set<std::string> free_variables(const ConstraintBundle& b, const Assignment& facts) {
  std::set<std::string> defined = defined_variables(b);
  std::set<std::string> out;
  for (const auto& v : b.vars)
    if (!facts.count(v.name) && !defined.count(v.name)) out.insert(v.name);
  return out;
}

Expr penalty_free(const ConstraintBundle& b) {
  const VarDecl* p = b.find_var(b.penalty_var);
  if (p && p->sort == Sort::Int) return ex::eq(Expr::var(b.penalty_var), Expr::int_lit(0));
  return ex::eq(Expr::var(b.penalty_var), Expr::bool_lit(false));
}

}  // namespace lexv
