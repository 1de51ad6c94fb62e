#include "lexv/report.hpp"

namespace lexv {

namespace {

std::string_view origin_name(Origin o) {
  switch (o) {
    case Origin::Hard: return "HARD";
    case Origin::Soft: return "SOFT";
    case Origin::Pin: return "PIN";
    case Origin::Bound: return "BOUND";
  }
  return "HARD";
}

}  // namespace

json to_json(const Verdict& v) {
  json j = {{"status", status_name(v.status)},
            {"core_minimal", v.core_minimal},
            {"elapsed_ms", v.elapsed_ms},
            {"solver_calls", v.solver_calls}};
  j["model"] = v.model ? assignment_to_json(*v.model) : json(nullptr);
  json core = json::array();
  for (const auto& m : v.core)
    core.push_back({{"name", m.name}, {"constraint_id", m.constraint_id}, {"group", m.group},
                    {"origin", origin_name(m.origin)}});
  j["core"] = std::move(core);
  j["core_groups"] = v.core_groups();
  return j;
}

json to_json(const IllegalTermReport& r) {
  json terms = json::array();
  for (const auto& t : r.terms) terms.push_back({{"group", t.group}, {"constraint_ids", t.constraint_ids}});
  return {{"terms", terms},
          {"rounds", r.rounds},
          {"round_count", r.rounds.size()},
          {"sat_reached", r.sat_reached},
          {"complete", r.complete},
          {"elapsed_ms", r.elapsed_ms},
          {"solver_calls", r.solver_calls}};
}

json to_json(const CorrectionResult& r, const std::vector<std::string>& trace) {
  json delta = json::array();
  for (const auto& d : r.delta) {
    json diffs = json::array();
    for (const auto& v : d.diffs)
      diffs.push_back({{"var", v.var},
                       {"before", v.before ? value_to_json(*v.before) : json(nullptr)},
                       {"after", value_to_json(v.after)},
                       {"text", format_diff(v)}});
    delta.push_back({{"constraint_id", d.constraint_id},
                     {"group", d.group},
                     {"weight", d.weight},
                     {"original_truth", d.original_truth ? json(*d.original_truth) : json(nullptr)},
                     {"diffs", diffs}});
  }
  json j = {{"model", assignment_to_json(r.model)},
            {"delta", delta},
            {"cost", r.cost},
            {"total_weight", r.total_weight},
            {"satisfied_weight", r.satisfied_weight()},
            {"strategy", strategy_name(r.strategy)},
            {"checks_performed", r.checks_performed},
            {"elapsed_ms", r.elapsed_ms},
            {"compliant", r.delta.empty()}};
  if (!trace.empty()) j["trace"] = trace;
  return j;
}

}  // namespace lexv
