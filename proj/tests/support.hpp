#pragma once

#include "lexv/bundle.hpp"
#include "lexv/json.hpp"
#include "lexv/legal_parser.hpp"
#include "lexv/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace lexv::test {

std::filesystem::path fixture(const std::string& rel);
std::string read_text(const std::filesystem::path& p);

/// Solver named by $LEXV_SOLVER (set by ctest), probed once per process.
const Solver& solver();

ConstraintBundle fsc_bundle();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Writes an executable shell script and returns its path.
std::filesystem::path write_script(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& body);

// ------------------------------------------------------------------ oracles
//
// These answer the same questions as the engine by exhaustive search. They
// drive the solver through push/pop scopes with plain asserts, sharing only
// the process transport and the expression printer with the engine.

class ScopedChecker {
 public:
  explicit ScopedChecker(const ConstraintBundle& b);
  /// Satisfiability of the conjunction of `formulas`.
  bool sat(const std::vector<Expr>& formulas);
  /// Model of the conjunction, or nothing when unsatisfiable.
  std::optional<Assignment> model(const std::vector<Expr>& formulas);
  int checks() const { return checks_; }

 private:
  ConstraintBundle b_;
  SortEnv env_;
  SolverProcess proc_;
  int checks_ = 0;
};

/// Minimum total weight of dropped SOFT constraints such that HARD, the
/// penalty pin and the kept SOFT constraints are jointly satisfiable.
/// Relaxations are visited by ascending dropped weight; supersets of known
/// unsatisfiable kept sets are skipped. Returns -1 when nothing is feasible.
long brute_force_min_cost(const ConstraintBundle& b, const std::map<std::string, long>& weights,
                          int* checks = nullptr);

/// Every minimal unsatisfiable subset of all constraints plus the pin
/// (named by kPinName), by full subset enumeration. Meant for <= 12 elements.
std::vector<std::set<std::string>> brute_force_muses(const ConstraintBundle& b);

/// Originally HARD members of all minimal unsatisfiable subsets.
std::set<std::string> brute_force_term_union(const ConstraintBundle& b);

/// Randomized statute text with known expected parse.
struct FuzzDoc {
  std::string text;
  std::vector<std::string> keys;    // normalized article numbers in order
  std::vector<std::string> titles;
  std::string body;                 // every content/clause line, whitespace removed
};
/// `zh` selects Chinese numbering and punctuation. Deterministic in `seed`.
FuzzDoc fuzz_document(std::uint64_t seed, bool zh);

/// Concatenated content and clauses of all articles, whitespace removed.
std::string article_body(const ArticleMap& m);

/// Supervisory level for capital adequacy ratio r (percent) and net worth.
int reference_capital_level(const Rational& r, const Rational& net_worth);

}  // namespace lexv::test
