#pragma once

#include "lexv/bundle.hpp"
#include "lexv/smtlib.hpp"
#include "lexv/solver.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace lexv {

struct Verdict {
  Status status = Status::Unknown;
  std::optional<Assignment> model;
  std::vector<CoreMember> core;  // named core when UNSAT
  bool core_minimal = false;
  double elapsed_ms = 0;
  int solver_calls = 0;

  std::set<std::string> core_groups() const;
  std::set<std::string> core_ids() const;
};

/// Solves the HARD set alone. UNSAT verdicts carry a minimal core.
Verdict check_law_consistency(const ConstraintBundle& b, const Solver& solver);

/// Solves HARD ∪ facts ∪ {penalty = false}. UNSAT is the expected outcome
/// and carries a minimal unsatisfiable core; SAT means the encoding does not
/// capture the violation.
Verdict check_case_illegality(const ConstraintBundle& b, const Solver& solver, bool minimize_core = true);

struct TermGroup {
  std::string group;
  std::vector<std::string> constraint_ids;
};

struct IllegalTermReport {
  std::vector<TermGroup> terms;                  // sorted by group
  std::vector<std::vector<std::string>> rounds;  // per-round core members
  bool sat_reached = false;
  /// False when a round hit the MUS enumeration cap.
  bool complete = true;
  double elapsed_ms = 0;
  int solver_calls = 0;

  std::set<std::string> term_ids() const;
  std::set<std::string> term_groups() const;
};

struct EnumerationOptions {
  std::size_t max_mus_per_round = 4096;
  /// Subset checks allowed per round before it is reported incomplete.
  int max_checks_per_round = 20000;
};

/// Hardens every constraint, then repeatedly extracts unsatisfiable cores,
/// collects their statutory (originally HARD) members and drops their
/// factual (originally SOFT) members until the remainder is satisfiable.
/// Each round's core is the union of every minimal core the drop would
/// hide, so `terms` covers all minimal conflicts. Rounds <= |SOFT| + 1.
/// Throws PreconditionViolation when the case is not illegal.
IllegalTermReport enumerate_illegal_terms(const ConstraintBundle& b, const Solver& solver,
                                          const EnumerationOptions& opts = {});

/// Satisfiability of an arbitrary subset of named elements (constraint ids
/// and, optionally, the penalty pin) asserted as HARD.
SolverReply check_subset(const ConstraintBundle& b, const std::set<std::string>& names, const Solver& solver,
                         Query query = Query::Core);

/// Incremental subset checks on one solver process. Each constraint and
/// the penalty pin sits behind an activation literal; a subset is checked by
/// assuming the literals of its members.
class SubsetChecker {
 public:
  SubsetChecker(const ConstraintBundle& b, const Solver& solver);

  /// Same contract as check_subset; Query::Model also fetches a model.
  SolverReply check(const std::set<std::string>& names, Query query = Query::Core);
  int calls() const noexcept { return calls_; }

 private:
  SolverProcess proc_;
  std::map<std::string, std::string> act_;     // element -> literal
  std::map<std::string, std::string> member_;  // literal -> element
  SmtScript names_;                            // decls and name_map for replies
  int calls_ = 0;
};

/// Deletion-based shrinking of an unsatisfiable subset to a minimal one,
/// refining with each intermediate core. `calls` is incremented per check.
std::set<std::string> shrink_to_mus(const ConstraintBundle& b, std::set<std::string> unsat_set,
                                    const Solver& solver, int& calls);
std::set<std::string> shrink_to_mus(SubsetChecker& checker, std::set<std::string> unsat_set, int& calls);

}  // namespace lexv
