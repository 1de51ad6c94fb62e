#include "lexv/whatif.hpp"

#include <algorithm>

namespace lexv {

std::string_view action_name(ModifyAction a) {
  switch (a) {
    case ModifyAction::Toggle: return "TOGGLE";
    case ModifyAction::FixValue: return "FIX_VALUE";
    case ModifyAction::InjectParameter: return "INJECT_PARAMETER";
    case ModifyAction::SetWeight: return "SET_WEIGHT";
    case ModifyAction::SetKind: return "SET_KIND";
  }
  return "TOGGLE";
}

namespace {

std::optional<ModifyAction> parse_action(const std::string& s) {
  for (auto a : {ModifyAction::Toggle, ModifyAction::FixValue, ModifyAction::InjectParameter, ModifyAction::SetWeight,
                 ModifyAction::SetKind})
    if (s == action_name(a)) return a;
  return std::nullopt;
}

std::optional<Kind> parse_kind(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (s == "HARD") return Kind::Hard;
  if (s == "SOFT") return Kind::Soft;
  return std::nullopt;
}

Expr literal_expr(const Value& v) {
  switch (v.sort()) {
    case Sort::Bool: return Expr::bool_lit(v.as_bool());
    case Sort::Int: return Expr::int_lit(numerator(v.as_number()));
    case Sort::Real: return Expr::decimal_lit(v.as_number());
  }
  return Expr::bool_lit(false);
}

Value typed_value(const json& j, Sort sort, const std::string& what) {
  try {
    return value_from_json(j, sort);
  } catch (const FormatError& e) {
    throw ModifyError("sort mismatch for " + what + " (" + std::string(sort_name(sort)) + "): " + e.what());
  }
}

/// Pin constraints (SOFT literals) on `var`.
std::vector<Constraint*> facts_on(ConstraintBundle& b, const std::string& var) {
  const SortEnv env = b.sort_env();
  std::vector<Constraint*> out;
  for (auto& c : b.constraints)
    if (auto f = fact_literal(c, env); f && f->var == var) out.push_back(&c);
  return out;
}

void flip_literal(Constraint& c, const SortEnv& env) {
  auto f = fact_literal(c, env);
  const bool now = !f->value.as_bool();
  if (c.expr.op() == Op::Eq)
    c.expr = ex::eq(Expr::var(f->var), Expr::bool_lit(now));
  else
    c.expr = now ? Expr::var(f->var) : ex::lnot(Expr::var(f->var));
}

void toggle(ConstraintBundle& b, const ModifyRequest& r) {
  const SortEnv env = b.sort_env();
  if (Constraint* c = b.find_constraint(r.target)) {
    auto f = fact_literal(*c, env);
    if (f && f->value.sort() == Sort::Bool) {
      flip_literal(*c, env);
      b.facts.erase(f->var);
    } else if (c->hard()) {
      c->kind = Kind::Soft;
      c->weight = kDefaultSoftWeight;
    } else {
      c->kind = Kind::Hard;
      c->weight = 0;
    }
    return;
  }
  const VarDecl* v = b.find_var(r.target);
  if (!v) throw ModifyError("unknown target '" + r.target + "'");
  if (v->sort != Sort::Bool) throw ModifyError("TOGGLE needs a Bool variable; '" + r.target + "' is " +
                                               std::string(sort_name(v->sort)));
  auto facts = facts_on(b, r.target);
  if (facts.empty()) throw ModifyError("variable '" + r.target + "' has no asserted fact to toggle");
  for (Constraint* c : facts) flip_literal(*c, env);
  b.facts.erase(r.target);
}

void fix_value(ConstraintBundle& b, const ModifyRequest& r) {
  std::string var = r.target;
  if (const Constraint* c = b.find_constraint(r.target)) {
    auto f = fact_literal(*c, b.sort_env());
    if (!f) throw ModifyError("constraint '" + r.target + "' is not a fact about a single variable");
    var = f->var;
  }
  const VarDecl* v = b.find_var(var);
  if (!v) throw ModifyError("unknown target '" + r.target + "'");
  const Value val = typed_value(r.value, v->sort, var);
  const Expr pin = ex::eq(Expr::var(var), literal_expr(val));
  auto facts = facts_on(b, var);
  if (!facts.empty()) {
    facts.front()->expr = pin;
    const std::string keep = facts.front()->id;
    std::erase_if(b.constraints, [&](const Constraint& c) {
      return c.id != keep && std::any_of(facts.begin(), facts.end(), [&](const Constraint* f) { return f->id == c.id; });
    });
  } else {
    std::string id = "fact_" + var;
    for (int n = 2; b.find_constraint(id) || b.find_var(id); ++n) id = "fact_" + var + "_" + std::to_string(n);
    b.constraints.push_back({id, Kind::Soft, pin, kDefaultSoftWeight, "fact:" + var, {}});
  }
  b.facts.erase(var);
}

void inject(ConstraintBundle& b, const ModifyRequest& r) {
  const std::string name = r.name.empty() ? r.target : r.name;
  if (!is_identifier(name)) throw ModifyError("'" + name + "' is not a valid identifier");
  if (b.find_constraint(name)) throw ModifyError("'" + name + "' already names a constraint");
  Sort sort;
  if (const VarDecl* v = b.find_var(name)) {
    if (r.sort && *r.sort != v->sort) throw ModifyError("parameter '" + name + "' already declared as " +
                                                         std::string(sort_name(v->sort)));
    sort = v->sort;
  } else {
    if (!r.sort) throw ModifyError("INJECT_PARAMETER needs a sort for new variable '" + name + "'");
    sort = *r.sort;
    b.vars.push_back({name, sort, "param:" + name});
  }
  const Value val = typed_value(r.value, sort, name);
  const std::string id = "param_" + name;
  Constraint c{id, Kind::Hard, ex::eq(Expr::var(name), literal_expr(val)), 0, "param:" + name, {}};
  if (Constraint* existing = b.find_constraint(id))
    *existing = c;
  else
    b.constraints.push_back(std::move(c));
}

}  // namespace

ModifyRequest modify_request_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("modify request must be an object");
  ModifyRequest r;
  if (!j.contains("target") || !j["target"].is_string()) throw FormatError("modify request needs a string 'target'");
  r.target = j["target"].get<std::string>();
  if (!j.contains("action") || !j["action"].is_string()) throw FormatError("modify request needs an 'action'");
  auto a = parse_action(j["action"].get<std::string>());
  if (!a) throw FormatError("unknown action '" + j["action"].get<std::string>() + "'");
  r.action = *a;
  if (!j.contains("expected_version") || !j["expected_version"].is_number_integer())
    throw FormatError("modify request needs an integer 'expected_version'");
  r.expected_version = j["expected_version"].get<long>();
  if (j.contains("value")) r.value = j["value"];
  r.name = j.value("name", "");
  if (j.contains("sort")) {
    auto s = parse_sort(j["sort"].get<std::string>());
    if (!s) throw FormatError("unknown sort '" + j["sort"].get<std::string>() + "'");
    r.sort = *s;
  }
  if (j.contains("weight")) {
    if (!j["weight"].is_number_integer()) throw FormatError("'weight' must be an integer");
    r.weight = j["weight"].get<long>();
  }
  if (j.contains("kind")) {
    auto k = j["kind"].is_string() ? parse_kind(j["kind"].get<std::string>()) : std::nullopt;
    if (!k) throw FormatError("'kind' must be HARD or SOFT");
    r.kind = *k;
  }
  switch (r.action) {
    case ModifyAction::FixValue:
    case ModifyAction::InjectParameter:
      if (!j.contains("value")) throw FormatError(std::string(action_name(r.action)) + " needs a 'value'");
      break;
    case ModifyAction::SetWeight:
      if (!r.weight) throw FormatError("SET_WEIGHT needs a 'weight'");
      break;
    case ModifyAction::SetKind:
      if (!r.kind) throw FormatError("SET_KIND needs a 'kind'");
      break;
    case ModifyAction::Toggle: break;
  }
  return r;
}

json to_json(const ModifyRequest& r) {
  json j = {{"target", r.target}, {"action", action_name(r.action)}};
  if (!r.value.is_null()) j["value"] = r.value;
  if (!r.name.empty()) j["name"] = r.name;
  if (r.sort) j["sort"] = sort_name(*r.sort);
  if (r.weight) j["weight"] = *r.weight;
  if (r.kind) j["kind"] = *r.kind == Kind::Hard ? "HARD" : "SOFT";
  if (r.expected_version) j["expected_version"] = *r.expected_version;
  return j;
}

ConstraintBundle apply_modify(const ConstraintBundle& in, const ModifyRequest& r) {
  ConstraintBundle b = in;
  switch (r.action) {
    case ModifyAction::Toggle: toggle(b, r); break;
    case ModifyAction::FixValue: fix_value(b, r); break;
    case ModifyAction::InjectParameter: inject(b, r); break;
    case ModifyAction::SetWeight: {
      Constraint* c = b.find_constraint(r.target);
      if (!c) throw ModifyError("unknown constraint '" + r.target + "'");
      if (c->hard()) throw ModifyError("SET_WEIGHT applies to SOFT constraints; '" + r.target + "' is HARD");
      if (*r.weight < 1) throw ModifyError("weight must be a positive integer");
      c->weight = *r.weight;
      break;
    }
    case ModifyAction::SetKind: {
      Constraint* c = b.find_constraint(r.target);
      if (!c) throw ModifyError("unknown constraint '" + r.target + "'");
      c->kind = *r.kind;
      c->weight = *r.kind == Kind::Hard ? 0 : r.weight.value_or(c->weight > 0 ? c->weight : kDefaultSoftWeight);
      if (c->soft() && c->weight < 1) throw ModifyError("weight must be a positive integer");
      break;
    }
  }
  require_valid(b);
  return b;
}

}  // namespace lexv
