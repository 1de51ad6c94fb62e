#pragma once

#include "lexv/bundle.hpp"
#include "lexv/sexpr.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lexv {

/// CONSISTENCY: HARD only. ILLEGALITY: HARD + facts as HARD + penalty pin.
/// HARDENED: every constraint as HARD (pin optional). RELAXATION: HARD plus
/// `(or s_i sel_i)` per SOFT constraint and a weighted bound on the selectors.
enum class Mode { Consistency, Illegality, Hardened, Relaxation };

std::string_view mode_name(Mode m);

enum class Query { Default, Model, Core };

/// What a named assertion stands for.
enum class Origin { Hard, Soft, Pin, Bound };

struct Tracked {
  std::string constraint_id;
  std::string group;
  Origin origin = Origin::Hard;
};

inline constexpr std::string_view kPinName = "lexv_penalty_pin";
inline constexpr std::string_view kPinGroup = "meta:penalty_pin";
inline constexpr std::string_view kBoundName = "lexv_cost_bound";

struct EmitOptions {
  /// RELAXATION only: bound k on the weighted selector sum. Without it no
  /// bound is asserted.
  std::optional<long> cost_bound;
  /// Assert penalty = false. Always on in ILLEGALITY mode.
  bool pin_penalty = false;
  Query query = Query::Default;
  /// Constraint ids omitted from the script.
  std::set<std::string> exclude;
  /// Per-constraint weight replacing the declared one (RELAXATION).
  std::map<std::string, long> weights;
};

struct SmtScript {
  std::string text;
  std::map<std::string, Tracked> name_map;    // assertion name -> constraint
  std::map<std::string, Sort> decls;          // declared symbols
  std::map<std::string, std::string> selectors;  // selector -> constraint id
  Mode mode = Mode::Consistency;
  Query query = Query::Model;
};

/// Pure function of its inputs; identical arguments give byte-identical text.
/// Throws UnsupportedExpr for nonlinear terms that escaped validation.
SmtScript emit_script(const ConstraintBundle& b, Mode mode, const EmitOptions& opts = {});

/// SMT-LIB rendering of one expression (Int literals promoted under Real).
std::string emit_expr(const Expr& e, const SortEnv& env);

/// Exact numeral rendering: "5", "(- 5)", "100.0", "(/ 11109 100)".
std::string emit_number(const Rational& q, Sort sort);

enum class Status { Sat, Unsat, Unknown };
std::string_view status_name(Status s);  // "sat" | "unsat" | "unknown"

struct CoreMember {
  std::string name;
  std::string constraint_id;
  std::string group;
  Origin origin = Origin::Hard;
};

struct SolverReply {
  Status status = Status::Unknown;
  std::optional<Assignment> model;
  std::optional<std::vector<CoreMember>> core;
  std::string raw;
  double wall_ms = 0;
};

/// Parses the solver's response to `script`. Model values are exact;
/// declared symbols the solver omitted default to the zero of their sort.
/// Throws ProtocolError with the offending text on malformed output.
SolverReply parse_reply(const std::string& raw, const SmtScript& script);

/// Reads one model value term: `true`, `-3`, `(- 2.5)`, `(/ 11109.0 100.0)`.
Value parse_model_value(const SExpr& term, Sort sort);

}  // namespace lexv
