#include "lexv/maxsmt.hpp"

#include "lexv/errors.hpp"
#include "lexv/smtlib.hpp"

#include <chrono>

namespace lexv {

std::string_view strategy_name(Strategy s) {
  return s == Strategy::LinearSearch ? "LINEAR_SEARCH" : "CORE_GUIDED";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "linear" || s == "LINEAR_SEARCH") return Strategy::LinearSearch;
  if (s == "core" || s == "CORE_GUIDED") return Strategy::CoreGuided;
  return std::nullopt;
}

std::map<std::string, long> effective_weights(const ConstraintBundle& b, const WeightOverride& override) {
  std::map<std::string, long> out;
  for (const auto& c : b.constraints) {
    if (!c.soft()) continue;
    long w = c.weight;
    if (auto it = override.find(c.id); it != override.end()) w *= it->second;
    if (auto it = override.find(c.group); it != override.end() && c.group != c.id) w *= it->second;
    if (w < 1) throw Error("weight override for " + c.id + " must stay positive");
    out.emplace(c.id, w);
  }
  return out;
}

std::string format_diff(const VarDiff& d) {
  return d.var + ": " + (d.before ? d.before->to_string() : std::string("?")) + " → " + d.after.to_string();
}

CorrectionResult assess_model(const ConstraintBundle& b, const Assignment& model,
                              const std::map<std::string, long>& weights) {
  CorrectionResult r;
  r.model = model;
  const Assignment facts = asserted_facts(b);
  for (const auto& c : b.constraints) {
    if (!c.soft()) continue;
    const long w = weights.at(c.id);
    r.total_weight += w;
    if (eval_expr(c.expr, model).as_bool()) continue;
    DeltaEntry d;
    d.constraint_id = c.id;
    d.group = c.group;
    d.weight = w;
    try {
      d.original_truth = eval_expr(c.expr, facts).as_bool();
    } catch (const FreeVariableEncountered&) {
    }
    for (const auto& v : vars_of(c.expr)) {
      VarDiff diff;
      diff.var = v;
      diff.after = model.at(v);
      if (auto it = facts.find(v); it != facts.end()) {
        diff.before = it->second;
        if (*diff.before == diff.after) continue;
      }
      d.diffs.push_back(std::move(diff));
    }
    r.cost += w;
    r.delta.push_back(std::move(d));
  }
  return r;
}

namespace {

using Clock = std::chrono::steady_clock;

void check_feasible(const ConstraintBundle& b, const Solver& solver, int& checks) {
  EmitOptions o;
  o.pin_penalty = true;
  SolverReply r = solver.check(emit_script(b, Mode::Consistency, o));
  ++checks;
  if (r.status == Status::Unsat) throw NoFeasibleCompliance();
  if (r.status != Status::Sat) throw Error("solver returned unknown on the hard set");
}

CorrectionResult linear_search(const ConstraintBundle& b, const Solver& solver,
                               const std::map<std::string, long>& weights, int& checks) {
  long total = 0;
  for (const auto& [id, w] : weights) total += w;
  EmitOptions o;
  o.pin_penalty = true;
  o.weights = weights;
  for (long k = 0; k <= total; ++k) {
    o.cost_bound = k;
    SolverReply r;
    try {
      r = solver.check(emit_script(b, Mode::Relaxation, o));
    } catch (const SolverTimeout& t) {
      throw t.with_lower_bound(k);
    }
    ++checks;
    if (r.status == Status::Sat) {
      CorrectionResult res = assess_model(b, *r.model, weights);
      if (res.cost > k) throw Error("relaxation model exceeds its cost bound");
      return res;
    }
    if (r.status != Status::Unsat) throw Error("solver returned unknown during linear search");
  }
  throw NoFeasibleCompliance();
}

// Weighted Fu-Malik (WPM1): every core of soft copies raises the lower bound
// by its minimum weight; heavier members are split, core members gain a
// fresh relaxation variable, and exactly one of those may fire.
CorrectionResult core_guided(const ConstraintBundle& b, const Solver& solver,
                             const std::map<std::string, long>& weights, int& checks) {
  struct Copy {
    std::string name;
    Expr expr;
    long weight;
  };
  std::vector<Copy> copies;
  for (const auto& c : b.constraints)
    if (c.soft()) copies.push_back({"lexv_soft_" + std::to_string(copies.size()), c.expr, weights.at(c.id)});
  std::vector<Constraint> cards;
  std::vector<VarDecl> relax_vars;
  long lower_bound = 0;
  std::size_t next_copy = copies.size();

  auto working = [&] {
    ConstraintBundle w;
    w.case_id = b.case_id;
    w.vars = b.vars;
    w.vars.insert(w.vars.end(), relax_vars.begin(), relax_vars.end());
    w.penalty_var = b.penalty_var;
    for (const auto& c : b.constraints)
      if (c.hard()) w.constraints.push_back(c);
    w.constraints.insert(w.constraints.end(), cards.begin(), cards.end());
    for (const auto& cp : copies) {
      Constraint s;
      s.id = cp.name;
      s.kind = Kind::Soft;
      s.weight = cp.weight;
      s.expr = cp.expr;
      w.constraints.push_back(std::move(s));
    }
    return w;
  };

  for (;;) {
    ConstraintBundle w = working();
    EmitOptions o;
    o.pin_penalty = true;
    o.query = Query::Core;
    SolverReply r;
    try {
      r = solver.check(emit_script(w, Mode::Hardened, o));
    } catch (const SolverTimeout& t) {
      throw t.with_lower_bound(lower_bound);
    }
    ++checks;
    if (r.status == Status::Sat) {
      o.query = Query::Model;
      SolverReply m = solver.check(emit_script(w, Mode::Hardened, o));
      ++checks;
      if (m.status != Status::Sat) throw Error("solver gave inconsistent answers during core-guided search");
      Assignment model;
      for (const auto& v : b.vars) model.insert_or_assign(v.name, m.model->at(v.name));
      CorrectionResult res = assess_model(b, model, weights);
      if (res.cost != lower_bound) throw Error("core-guided model cost differs from its lower bound");
      return res;
    }
    if (r.status != Status::Unsat) throw Error("solver returned unknown during core-guided search");

    std::set<std::string> in_core;
    for (const auto& m : r.core.value_or(std::vector<CoreMember>{}))
      if (m.origin == Origin::Soft) in_core.insert(m.name);
    if (in_core.empty()) throw NoFeasibleCompliance();

    long wmin = 0;
    for (const auto& cp : copies)
      if (in_core.count(cp.name)) wmin = wmin == 0 ? cp.weight : std::min(wmin, cp.weight);

    std::vector<Copy> split;
    std::vector<Expr> fired;
    for (auto& cp : copies) {
      if (!in_core.count(cp.name)) continue;
      if (cp.weight > wmin) {
        split.push_back({"lexv_soft_" + std::to_string(next_copy++), cp.expr, cp.weight - wmin});
        cp.weight = wmin;
      }
      std::string relax = "lexv_relax_" + std::to_string(relax_vars.size());
      relax_vars.push_back({relax, Sort::Bool, ""});
      cp.expr = ex::lor({cp.expr, Expr::var(relax)});
      fired.push_back(ex::ite(Expr::var(relax), ex::i(1), ex::i(0)));
    }
    copies.insert(copies.end(), split.begin(), split.end());
    Constraint card;
    card.id = "lexv_card_" + std::to_string(cards.size());
    card.group = "meta:relaxation";
    card.expr = ex::eq(fired.size() == 1 ? fired[0] : ex::add(fired), ex::i(1));
    cards.push_back(std::move(card));
    lower_bound += wmin;
  }
}

}  // namespace

CorrectionResult minimize_violation(const ConstraintBundle& b, const Solver& solver, Strategy strategy,
                                    const WeightOverride& override) {
  require_valid(b);
  const auto t0 = Clock::now();
  const auto weights = effective_weights(b, override);
  int checks = 0;
  check_feasible(b, solver, checks);
  if (strategy == Strategy::CoreGuided) solver.require_cores();
  CorrectionResult r = strategy == Strategy::LinearSearch ? linear_search(b, solver, weights, checks)
                                                          : core_guided(b, solver, weights, checks);
  r.strategy = strategy;
  r.checks_performed = checks;
  r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return r;
}

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  if (from.empty()) return;
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
}

}  // namespace

std::vector<std::string> render_trace(const CorrectionResult& r, const ConstraintBundle& b,
                                      const TracePhraser& phraser) {
  if (r.delta.empty()) return {"case is compliant; no revision required"};
  std::vector<std::string> lines;
  for (const auto& d : r.delta) {
    std::vector<std::string> parts;
    for (const auto& v : d.diffs) parts.push_back(format_diff(v));
    std::string diff;
    for (std::size_t i = 0; i < parts.size(); ++i) diff += (i ? ", " : "") + parts[i];

    std::string line;
    const Constraint* c = b.find_constraint(d.constraint_id);
    const std::string* tmpl = nullptr;
    if (c) {
      if (auto it = c->meta.find("description"); it != c->meta.end()) tmpl = &it->second;
    }
    if (tmpl) {
      line = *tmpl;
      replace_all(line, "{id}", d.constraint_id);
      replace_all(line, "{group}", d.group);
      replace_all(line, "{diff}", diff);
      if (!d.diffs.empty()) {
        const auto& first = d.diffs.front();
        replace_all(line, "{before}", first.before ? first.before->to_string() : "?");
        replace_all(line, "{after}", first.after.to_string());
      }
      for (const auto& v : d.diffs) {
        replace_all(line, "{" + v.var + ".before}", v.before ? v.before->to_string() : "?");
        replace_all(line, "{" + v.var + ".after}", v.after.to_string());
      }
    } else {
      std::string change;
      if (d.diffs.size() == 1) {
        const auto& v = d.diffs.front();
        change = (v.before ? v.before->to_string() : std::string("?")) + " → " + v.after.to_string();
      } else if (d.diffs.empty()) {
        change = "holds → violated";
      } else {
        change = diff;
      }
      line = "constraint " + d.constraint_id + " (" + d.group + ") requires revision: " + change;
    }
    lines.push_back(phraser ? phraser(line) : line);
  }
  return lines;
}

}  // namespace lexv
