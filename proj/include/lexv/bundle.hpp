#pragma once

#include "lexv/expr.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lexv {

struct VarDecl {
  std::string name;
  Sort sort = Sort::Bool;
  std::string group;
};

enum class Kind { Hard, Soft };

struct Constraint {
  std::string id;
  Kind kind = Kind::Hard;
  Expr expr = Expr::bool_lit(true);
  long weight = 0;  // >= 1 iff Soft
  std::string group;
  std::map<std::string, std::string> meta;

  bool hard() const { return kind == Kind::Hard; }
  bool soft() const { return kind == Kind::Soft; }
};

/// A case instance: statutory (HARD) and factual (SOFT) constraints over
/// declared variables.
struct ConstraintBundle {
  std::string case_id;
  std::vector<VarDecl> vars;
  std::vector<Constraint> constraints;
  std::string penalty_var;
  Assignment facts;
  std::map<std::string, std::string> meta;

  const VarDecl* find_var(std::string_view name) const;
  const Constraint* find_constraint(std::string_view id) const;
  Constraint* find_constraint(std::string_view id);
  SortEnv sort_env() const;
  std::vector<const Constraint*> hard() const;
  std::vector<const Constraint*> soft() const;
  long total_soft_weight() const;
};

inline constexpr long kDefaultSoftWeight = 1;

enum class ValidationCode {
  UnknownVariable,
  SortMismatch,
  NonLinear,
  DuplicateVariable,
  DuplicateId,
  NameClash,
  InvalidIdentifier,
  NonpositiveWeight,
  WeightOnHard,
  MissingPenaltyVar,
  BadPenaltySort,
  NoHardConstraint,
  NonBoolConstraint,
  BadFact,
};

struct ValidationError {
  ValidationCode code;
  std::string subject;  // variable name or constraint id
  std::string message;

  friend bool operator==(const ValidationError& a, const ValidationError& b) {
    return a.code == b.code && a.subject == b.subject;
  }
};

std::string_view code_name(ValidationCode c);

/// All invariant violations; empty means the bundle is valid.
std::vector<ValidationError> validate_bundle(const ConstraintBundle& b);

/// Throws InvalidBundle listing every error when validation fails.
void require_valid(const ConstraintBundle& b);

/// SMT-LIB simple symbol usable as a variable or assertion name. The prefix
/// "lexv_" is reserved for engine-generated symbols.
bool is_identifier(std::string_view s);

/// A SOFT constraint of shape `v`, `(not v)` or `(= v literal)` pins one
/// variable to a value; such constraints are the case facts.
struct FactLiteral {
  std::string var;
  Value value;
};
std::optional<FactLiteral> fact_literal(const Constraint& c, const SortEnv& env);

/// Values the case asserts: bundle.facts overlaid with SOFT fact literals.
Assignment asserted_facts(const ConstraintBundle& b);

/// Appends SOFT `fact_<name>` constraints for facts not already pinned.
void expand_facts(ConstraintBundle& b, long weight = kDefaultSoftWeight);

/// Variables whose value is fixed by a HARD defining equality `v = E`
/// (or `v <=> E`) with v not occurring in E.
std::set<std::string> defined_variables(const ConstraintBundle& b);

/// Declared variables that are neither assigned by `facts` nor defined.
std::set<std::string> free_variables(const ConstraintBundle& b, const Assignment& facts);

/// The formula forcing the penalty indicator off: `(= p false)` or `(= p 0)`.
Expr penalty_free(const ConstraintBundle& b);

}  // namespace lexv
