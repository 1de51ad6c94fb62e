#include "lexv/json.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace lexv {

namespace {

const std::map<std::string, Op, std::less<>>& op_table() {
  static const std::map<std::string, Op, std::less<>> t = {
      {"and", Op::And}, {"or", Op::Or}, {"not", Op::Not},
      {"=>", Op::Implies}, {"implies", Op::Implies},
      {"iff", Op::Iff}, {"<=>", Op::Iff},
      {"ite", Op::Ite}, {"+", Op::Add}, {"-", Op::Sub}, {"*", Op::Mul}, {"/", Op::Div},
      {"<", Op::Lt}, {"<=", Op::Le}, {">", Op::Gt}, {">=", Op::Ge},
      {"=", Op::Eq}, {"==", Op::Eq}, {"!=", Op::Ne}, {"distinct", Op::Ne},
  };
  return t;
}

std::string double_text(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

}  // namespace

json expr_to_json(const Expr& e) {
  switch (e.op()) {
    case Op::BoolLit: return e.bool_value();
    case Op::IntLit: {
      const BigInt n = numerator(e.number());
      if (n > std::numeric_limits<std::int64_t>::max() || n < std::numeric_limits<std::int64_t>::min())
        throw FormatError("integer literal out of range: " + n.str());
      return static_cast<std::int64_t>(n);
    }
    case Op::DecimalLit: return to_decimal(e.number());
    case Op::Var: return e.text();
    default: break;
  }
  json arr = json::array();
  arr.push_back(std::string(op_name(e.op())));
  for (const auto& a : e.args()) arr.push_back(expr_to_json(a));
  return arr;
}

Expr expr_from_json(const json& j) {
  if (j.is_boolean()) return Expr::bool_lit(j.get<bool>());
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Expr::int_lit(BigInt(j.get<std::uint64_t>()));
    return Expr::int_lit(BigInt(j.get<std::int64_t>()));
  }
  if (j.is_number_float()) return Expr::decimal_lit(double_text(j.get<double>()));
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (parse_decimal(s)) return Expr::decimal_lit(s);
    if (s.empty()) throw FormatError("empty variable name in expression");
    return Expr::var(s);
  }
  if (!j.is_array() || j.empty() || !j[0].is_string())
    throw FormatError("expression must be a literal, a name, or [op, args...]: " + j.dump());
  const auto& head = j[0].get_ref<const std::string&>();
  auto it = op_table().find(head);
  if (it == op_table().end()) throw FormatError("unknown operator '" + head + "'");
  std::vector<Expr> args;
  for (std::size_t i = 1; i < j.size(); ++i) args.push_back(expr_from_json(j[i]));
  Op op = it->second;
  if (op == Op::Sub && args.size() == 1) op = Op::Neg;
  if (op == Op::Sub && args.size() > 2) {
    // left-associative n-ary minus
    Expr acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) acc = ex::sub(acc, args[i]);
    return acc;
  }
  return Expr::make(op, std::move(args));
}

json value_to_json(const Value& v) {
  switch (v.sort()) {
    case Sort::Bool: return v.as_bool();
    case Sort::Int: {
      const BigInt n = numerator(v.as_number());
      if (n > std::numeric_limits<std::int64_t>::max() || n < std::numeric_limits<std::int64_t>::min())
        return n.str();
      return static_cast<std::int64_t>(n);
    }
    case Sort::Real: return to_decimal(v.as_number());
  }
  return nullptr;
}

Value value_from_json(const json& j, Sort sort) {
  if (sort == Sort::Bool) {
    if (!j.is_boolean()) throw FormatError("expected a Bool value, got " + j.dump());
    return Value::boolean(j.get<bool>());
  }
  std::optional<Rational> q;
  if (j.is_number_integer()) {
    q = j.is_number_unsigned() ? Rational(BigInt(j.get<std::uint64_t>()))
                               : Rational(BigInt(j.get<std::int64_t>()));
  } else if (j.is_number_float()) {
    q = parse_decimal(double_text(j.get<double>()));
  } else if (j.is_string()) {
    q = parse_decimal(j.get_ref<const std::string&>());
  }
  if (!q) throw FormatError("expected a numeric value, got " + j.dump());
  if (sort == Sort::Int) {
    if (!is_integral(*q)) throw FormatError("expected an Int value, got " + j.dump());
    return Value::integer(numerator(*q));
  }
  return Value::real(*q);
}

json assignment_to_json(const Assignment& a) {
  json out = json::object();
  for (const auto& [k, v] : a) out[k] = value_to_json(v);
  return out;
}

Assignment assignment_from_json(const json& j, const SortEnv& env) {
  if (!j.is_object()) throw FormatError("assignment must be an object");
  Assignment out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto s = env.find(it.key());
    if (s == env.end()) throw FormatError("value for undeclared variable '" + it.key() + "'");
    out.insert_or_assign(it.key(), value_from_json(it.value(), s->second));
  }
  return out;
}

json bundle_to_json(const ConstraintBundle& b) {
  json j;
  j["case_id"] = b.case_id;
  json vars = json::array();
  for (const auto& v : b.vars) {
    json d = {{"name", v.name}, {"sort", std::string(sort_name(v.sort))}};
    if (!v.group.empty()) d["group"] = v.group;
    vars.push_back(std::move(d));
  }
  j["vars"] = std::move(vars);
  json cs = json::array();
  for (const auto& c : b.constraints) {
    json d = {{"id", c.id}, {"kind", c.hard() ? "HARD" : "SOFT"}, {"group", c.group}};
    if (c.soft()) d["weight"] = c.weight;
    d["expr"] = expr_to_json(c.expr);
    if (!c.meta.empty()) d["meta"] = c.meta;
    cs.push_back(std::move(d));
  }
  j["constraints"] = std::move(cs);
  j["penalty_var"] = b.penalty_var;
  j["facts"] = assignment_to_json(b.facts);
  j["meta"] = b.meta;
  return j;
}

namespace {

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw FormatError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

ConstraintBundle bundle_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("bundle document must be a JSON object");
  ConstraintBundle b;
  b.case_id = field<std::string>(j, "case_id", "bundle");
  for (const auto& v : j.value("vars", json::array())) {
    VarDecl d;
    d.name = field<std::string>(v, "name", "var");
    auto s = parse_sort(field<std::string>(v, "sort", "var " + d.name));
    if (!s) throw FormatError("var " + d.name + ": unknown sort");
    d.sort = *s;
    d.group = v.value("group", "");
    b.vars.push_back(std::move(d));
  }
  for (const auto& c : j.value("constraints", json::array())) {
    Constraint k;
    k.id = field<std::string>(c, "id", "constraint");
    std::string where = "constraint " + k.id;
    std::string kind = field<std::string>(c, "kind", where);
    for (auto& ch : kind) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (kind == "HARD") {
      k.kind = Kind::Hard;
    } else if (kind == "SOFT") {
      k.kind = Kind::Soft;
    } else {
      throw FormatError(where + ": kind must be HARD or SOFT");
    }
    if (c.contains("weight")) {
      if (!c["weight"].is_number_integer()) throw FormatError(where + ": weight must be an integer");
      k.weight = c["weight"].get<long>();
    } else if (k.soft()) {
      k.weight = kDefaultSoftWeight;
    }
    k.group = c.value("group", "");
    if (!c.contains("expr")) throw FormatError(where + ": missing 'expr'");
    try {
      k.expr = expr_from_json(c["expr"]);
    } catch (const Error& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (c.contains("meta")) {
      for (auto it = c["meta"].begin(); it != c["meta"].end(); ++it)
        k.meta[it.key()] = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
    }
    b.constraints.push_back(std::move(k));
  }
  b.penalty_var = j.value("penalty_var", "");
  if (j.contains("facts")) {
    SortEnv env = b.sort_env();
    b.facts = assignment_from_json(j["facts"], env);
  }
  if (j.contains("meta")) {
    for (auto it = j["meta"].begin(); it != j["meta"].end(); ++it)
      b.meta[it.key()] = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
  }
  expand_facts(b);
  return b;
}

json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw NotFound("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

ConstraintBundle load_bundle(const std::filesystem::path& p) { return bundle_from_json(read_json_file(p)); }

void save_bundle(const ConstraintBundle& b, const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << bundle_to_json(b).dump(2) << '\n';
}

const json& bundle_schema() {
  static const json schema = json::parse(R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "ConstraintBundle",
  "type": "object",
  "required": ["case_id", "vars", "constraints", "penalty_var"],
  "definitions": {
    "expr": {
      "description": "Literal, variable name, decimal string, or [operator, args...]. Operators: and or not => iff ite + - * / < <= > >= = !=",
      "oneOf": [
        {"type": "boolean"},
        {"type": "integer"},
        {"type": "string"},
        {"type": "array", "minItems": 1, "items": [{"type": "string"}], "additionalItems": {"$ref": "#/definitions/expr"}}
      ]
    }
  },
  "properties": {
    "case_id": {"type": "string", "minLength": 1},
    "vars": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["name", "sort"],
        "properties": {
          "name": {"type": "string"},
          "sort": {"enum": ["Bool", "Int", "Real"]},
          "group": {"type": "string"}
        }
      }
    },
    "constraints": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["id", "kind", "expr"],
        "properties": {
          "id": {"type": "string"},
          "kind": {"enum": ["HARD", "SOFT"]},
          "weight": {"type": "integer", "minimum": 1},
          "group": {"type": "string"},
          "expr": {"$ref": "#/definitions/expr"},
          "meta": {"type": "object", "additionalProperties": {"type": "string"}}
        }
      }
    },
    "penalty_var": {"type": "string"},
    "facts": {"type": "object", "additionalProperties": {"type": ["boolean", "integer", "string"]}},
    "meta": {"type": "object", "additionalProperties": {"type": "string"}}
  }
})");
  return schema;
}

}  // namespace lexv
