#pragma once

#include "lexv/bundle.hpp"
#include "lexv/solver.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lexv {

enum class Strategy { LinearSearch, CoreGuided };

std::string_view strategy_name(Strategy s);  // "LINEAR_SEARCH" | "CORE_GUIDED"
std::optional<Strategy> parse_strategy(std::string_view s);  // also "linear" | "core"

struct VarDiff {
  std::string var;
  std::optional<Value> before;  // absent when the case left it free
  Value after = Value::boolean(false);
};

struct DeltaEntry {
  std::string constraint_id;
  std::string group;
  long weight = 1;
  std::optional<bool> original_truth;  // under the asserted facts
  bool satisfied_under_model = false;
  std::vector<VarDiff> diffs;
};

struct CorrectionResult {
  Assignment model;
  std::vector<DeltaEntry> delta;  // SOFT constraints false under the model
  long cost = 0;                  // sum of delta weights
  long total_weight = 0;
  Strategy strategy = Strategy::LinearSearch;
  int checks_performed = 0;
  double elapsed_ms = 0;

  long satisfied_weight() const { return total_weight - cost; }
};

/// Multipliers keyed by constraint id or group; effective weight = declared
/// weight times every matching multiplier.
using WeightOverride = std::map<std::string, long>;

std::map<std::string, long> effective_weights(const ConstraintBundle& b, const WeightOverride& override);

/// Weighted MaxSMT with penalty = false pinned as HARD. Throws
/// NoFeasibleCompliance when HARD ∪ {pin} is unsatisfiable and SolverTimeout
/// carrying the best certified lower bound.
CorrectionResult minimize_violation(const ConstraintBundle& b, const Solver& solver,
                                    Strategy strategy = Strategy::LinearSearch,
                                    const WeightOverride& override = {});

/// Builds delta/cost for an arbitrary total model.
CorrectionResult assess_model(const ConstraintBundle& b, const Assignment& model,
                              const std::map<std::string, long>& weights);

/// Optional post-processing hook for trace lines (e.g. an LLM rephrasing).
using TracePhraser = std::function<std::string(const std::string& line)>;

/// One line per delta member from `meta.description` templates, or the
/// canonical fallback. Placeholders: {id} {group} {diff} {before} {after}
/// {<var>.before} {<var>.after}.
std::vector<std::string> render_trace(const CorrectionResult& r, const ConstraintBundle& b,
                                      const TracePhraser& phraser = nullptr);

/// "improvement_plan_executed: false → true"
std::string format_diff(const VarDiff& d);

}  // namespace lexv
