#include "lexv/verification.hpp"

#include "lexv/errors.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace lexv {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::set<std::string> names_of(const std::vector<CoreMember>& core) {
  std::set<std::string> out;
  for (const auto& m : core) out.insert(m.name);
  return out;
}

CoreMember member_for(const ConstraintBundle& b, const std::string& name) {
  if (name == kPinName) return {name, name, std::string(kPinGroup), Origin::Pin};
  const Constraint* c = b.find_constraint(name);
  if (!c) throw Error("unknown core member " + name);
  return {name, c->id, c->group, c->hard() ? Origin::Hard : Origin::Soft};
}

std::vector<CoreMember> members_in_order(const ConstraintBundle& b, const std::set<std::string>& names) {
  std::vector<CoreMember> out;
  for (const auto& c : b.constraints)
    if (names.count(c.id)) out.push_back(member_for(b, c.id));
  if (names.count(std::string(kPinName))) out.push_back(member_for(b, std::string(kPinName)));
  return out;
}

std::vector<std::string> ids_in_order(const ConstraintBundle& b, const std::set<std::string>& names) {
  std::vector<std::string> out;
  for (const auto& m : members_in_order(b, names)) out.push_back(m.name);
  return out;
}

}  // namespace

std::set<std::string> Verdict::core_groups() const {
  std::set<std::string> out;
  for (const auto& m : core) out.insert(m.group);
  return out;
}

std::set<std::string> Verdict::core_ids() const {
  std::set<std::string> out;
  for (const auto& m : core) out.insert(m.constraint_id);
  return out;
}

std::set<std::string> IllegalTermReport::term_ids() const {
  std::set<std::string> out;
  for (const auto& g : terms) out.insert(g.constraint_ids.begin(), g.constraint_ids.end());
  return out;
}

std::set<std::string> IllegalTermReport::term_groups() const {
  std::set<std::string> out;
  for (const auto& g : terms) out.insert(g.group);
  return out;
}

SolverReply check_subset(const ConstraintBundle& b, const std::set<std::string>& names, const Solver& solver,
                         Query query) {
  EmitOptions opts;
  opts.query = query;
  opts.pin_penalty = names.count(std::string(kPinName)) > 0;
  for (const auto& c : b.constraints)
    if (!names.count(c.id)) opts.exclude.insert(c.id);
  return solver.check(emit_script(b, Mode::Hardened, opts));
}

SubsetChecker::SubsetChecker(const ConstraintBundle& b, const Solver& solver) : proc_(solver.config()) {
  const SortEnv env = b.sort_env();
  std::string head =
      "(set-option :produce-models true)\n(set-option :produce-unsat-cores true)\n(set-logic QF_LIRA)\n";
  for (const auto& v : b.vars) {
    head += "(declare-fun " + v.name + " () " + std::string(sort_name(v.sort)) + ")\n";
    names_.decls.emplace(v.name, v.sort);
  }
  auto guard = [&](const std::string& element, const std::string& formula, Tracked t) {
    std::string lit = "lexv_act_" + std::to_string(act_.size());
    head += "(declare-fun " + lit + " () Bool)\n(assert (=> " + lit + " " + formula + "))\n";
    act_.emplace(element, lit);
    member_.emplace(lit, element);
    names_.name_map.emplace(element, std::move(t));
  };
  for (const auto& c : b.constraints)
    guard(c.id, emit_expr(c.expr, env), {c.id, c.group, c.hard() ? Origin::Hard : Origin::Soft});
  guard(std::string(kPinName), emit_expr(penalty_free(b), env),
        {std::string(kPinName), std::string(kPinGroup), Origin::Pin});
  proc_.send(head);
  SExpr ack = proc_.ask("(echo \"lexv_ready\")");
  // z3 prints echoed strings bare, others keep the quotes
  if (ack.is_list() || ack.text != "lexv_ready")
    throw ProtocolError("solver rejected the session header", ack.to_string());
}

SolverReply SubsetChecker::check(const std::set<std::string>& names, Query query) {
  std::string cmd = "(check-sat-assuming (";
  for (const auto& n : names) {
    auto it = act_.find(n);
    if (it == act_.end()) throw Error("unknown subset element " + n);
    cmd += " " + it->second;
  }
  cmd += "))";
  ++calls_;
  const auto t0 = std::chrono::steady_clock::now();
  SExpr st = proc_.ask(cmd);
  SolverReply r;
  r.raw = st.to_string();
  if (st.is_atom("sat")) {
    r.status = Status::Sat;
  } else if (st.is_atom("unsat")) {
    r.status = Status::Unsat;
  } else if (st.is_atom("unknown")) {
    r.status = Status::Unknown;
  } else {
    throw ProtocolError("expected sat/unsat/unknown", r.raw);
  }
  if (r.status == Status::Unsat && query == Query::Core) {
    SExpr core = proc_.ask("(get-unsat-core)");
    if (!core.is_list()) throw ProtocolError("malformed unsat core", core.to_string());
    std::vector<CoreMember> out;
    for (const auto& lit : core.items) {
      auto m = member_.find(lit.text);
      if (!lit.is_atom() || m == member_.end())
        throw ProtocolError("core names an unknown assertion '" + lit.text + "'", core.to_string());
      const Tracked& t = names_.name_map.at(m->second);
      out.push_back({m->second, t.constraint_id, t.group, t.origin});
    }
    r.core = std::move(out);
  } else if (r.status == Status::Sat && query == Query::Model) {
    std::string cmd = "(get-value (";
    for (const auto& [name, sort] : names_.decls) cmd += " " + name;
    SExpr vals = proc_.ask(cmd + "))");
    if (!vals.is_list()) throw ProtocolError("malformed get-value reply", vals.to_string());
    Assignment model;
    for (const auto& pair : vals.items) {
      if (!pair.is_list() || pair.items.size() != 2 || !pair.items[0].is_atom())
        throw ProtocolError("malformed get-value entry", pair.to_string());
      auto d = names_.decls.find(pair.items[0].text);
      if (d == names_.decls.end()) continue;
      model.insert_or_assign(d->first, parse_model_value(pair.items[1], d->second));
    }
    r.model = std::move(model);
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

template <class Check>
std::set<std::string> shrink_with(std::set<std::string> current, Check&& check, int& calls) {
  std::set<std::string> critical;
  for (;;) {
    auto it = std::find_if(current.begin(), current.end(),
                           [&](const std::string& n) { return !critical.count(n); });
    if (it == current.end()) break;
    std::string candidate = *it;
    std::set<std::string> trial = current;
    trial.erase(candidate);
    SolverReply r = check(trial);
    ++calls;
    if (r.status == Status::Unsat) {
      // Every critical element survives in any unsatisfiable subset.
      current = r.core ? names_of(*r.core) : trial;
    } else if (r.status == Status::Sat) {
      critical.insert(candidate);
    } else {
      throw Error("solver returned unknown while minimizing a core");
    }
  }
  return current;
}

}  // namespace

std::set<std::string> shrink_to_mus(const ConstraintBundle& b, std::set<std::string> current,
                                    const Solver& solver, int& calls) {
  if (current.size() > 2) {
    // One process for the whole shrink beats one spawn per deletion.
    SubsetChecker checker(b, solver);
    return shrink_to_mus(checker, std::move(current), calls);
  }
  return shrink_with(
      std::move(current), [&](const std::set<std::string>& s) { return check_subset(b, s, solver); }, calls);
}

std::set<std::string> shrink_to_mus(SubsetChecker& checker, std::set<std::string> current, int& calls) {
  return shrink_with(
      std::move(current), [&](const std::set<std::string>& s) { return checker.check(s); }, calls);
}

namespace {

Verdict finish_unsat(const ConstraintBundle& b, const SolverReply& r, const Solver& solver, bool minimize,
                     Verdict v) {
  v.status = Status::Unsat;
  std::set<std::string> core = names_of(r.core.value_or(std::vector<CoreMember>{}));
  if (minimize && !core.empty()) {
    core = shrink_to_mus(b, std::move(core), solver, v.solver_calls);
    v.core_minimal = true;
  }
  v.core = members_in_order(b, core);
  return v;
}

}  // namespace

Verdict check_law_consistency(const ConstraintBundle& b, const Solver& solver) {
  require_valid(b);
  const auto t0 = Clock::now();
  Verdict v;
  SolverReply r = solver.check(emit_script(b, Mode::Consistency));
  v.solver_calls = 1;
  v.status = r.status;
  if (r.status == Status::Sat) {
    v.model = std::move(r.model);
  } else if (r.status == Status::Unsat) {
    solver.require_cores();
    EmitOptions opts;
    opts.query = Query::Core;
    SolverReply rc = solver.check(emit_script(b, Mode::Consistency, opts));
    ++v.solver_calls;
    if (rc.status != Status::Unsat) throw Error("solver gave inconsistent answers for the law base");
    v = finish_unsat(b, rc, solver, true, std::move(v));
  }
  v.elapsed_ms = ms_since(t0);
  return v;
}

Verdict check_case_illegality(const ConstraintBundle& b, const Solver& solver, bool minimize_core) {
  require_valid(b);
  solver.require_cores();
  const auto t0 = Clock::now();
  Verdict v;
  SolverReply r = solver.check(emit_script(b, Mode::Illegality));
  v.solver_calls = 1;
  v.status = r.status;
  if (r.status == Status::Unsat) v = finish_unsat(b, r, solver, minimize_core, std::move(v));
  v.elapsed_ms = ms_since(t0);
  return v;
}

namespace {

/// Clause store over subset-selection variables, solved by a pure Boolean
/// solver session. Literal +k selects element k-1, -k excludes it.
class SeedMap {
 public:
  SeedMap(const SolverConfig& cfg, std::size_t n) : proc_(cfg), n_(n) {
    std::string head = "(set-option :produce-models true)\n(set-logic QF_UF)\n";
    for (std::size_t i = 0; i < n; ++i) head += "(declare-fun " + var(i) + " () Bool)\n";
    proc_.send(head);
  }

  void add_clause(const std::vector<int>& lits) {
    std::string body;
    for (int l : lits) {
      const std::string v = var(static_cast<std::size_t>(std::abs(l) - 1));
      body += " " + (l > 0 ? v : "(not " + v + ")");
    }
    if (lits.empty()) body = "false";
    else if (lits.size() == 1) body.erase(0, 1);
    else body = "(or" + body + ")";
    proc_.send("(assert " + body + ")\n");
  }

  std::optional<std::vector<bool>> solve() {
    SExpr st = proc_.ask("(check-sat)");
    if (st.is_atom("unsat")) return std::nullopt;
    if (!st.is_atom("sat")) throw ProtocolError("seed map check failed", st.to_string());
    std::vector<bool> out(n_);
    if (n_ == 0) return out;
    std::string cmd = "(get-value (";
    for (std::size_t i = 0; i < n_; ++i) cmd += " " + var(i);
    SExpr vals = proc_.ask(cmd + "))");
    if (!vals.is_list() || vals.items.size() != n_) throw ProtocolError("malformed seed map values", vals.to_string());
    for (std::size_t i = 0; i < n_; ++i) {
      const SExpr& p = vals.items[i];
      if (!p.is_list() || p.items.size() != 2) throw ProtocolError("malformed seed map value", p.to_string());
      out[i] = p.items[1].is_atom("true");
    }
    return out;
  }

 private:
  static std::string var(std::size_t i) { return "m" + std::to_string(i); }
  SolverProcess proc_;
  std::size_t n_;
};

class Enumerator {
 public:
  Enumerator(const ConstraintBundle& b, const Solver& s, const EnumerationOptions& o, IllegalTermReport& rep)
      : b_(b), solver_(s), checker_(b, s), pin_(penalty_free(b)), opts_(o), rep_(rep) {
    for (const auto& c : b.constraints) formula_.emplace(c.id, &c.expr);
    formula_.emplace(std::string(kPinName), &pin_);
  }

  bool holds(const std::string& n, const Assignment& model) const {
    try {
      return eval_expr(*formula_.at(n), model).as_bool();
    } catch (const Error&) {
      return false;
    }
  }

  /// Extends a satisfiable subset of `working` to a maximal one, first with
  /// every element its model already satisfies, then one check per
  /// remaining element.
  std::set<std::string> grow(std::set<std::string> s, const Assignment& model,
                             const std::set<std::string>& working) {
    auto absorb = [&](const Assignment& m) {
      for (const auto& e : working)
        if (!s.count(e) && holds(e, m)) s.insert(e);
    };
    absorb(model);
    for (const auto& e : working) {
      if (s.count(e)) continue;
      s.insert(e);
      SolverReply r = checker_.check(s, Query::Model);
      ++rep_.solver_calls;
      if (r.status == Status::Sat) {
        absorb(*r.model);
      } else {
        s.erase(e);
      }
    }
    return s;
  }

  bool is_soft(const std::string& n) const {
    const Constraint* c = b_.find_constraint(n);
    return c && c->soft();
  }
  bool is_hard(const std::string& n) const {
    const Constraint* c = b_.find_constraint(n);
    return c && c->hard();
  }

  /// All MUSes of `working` that intersect `region` (every MUS when region
  /// equals working), seeded with already known ones.
  std::vector<std::set<std::string>> sweep(const std::set<std::string>& working,
                                           const std::set<std::string>& region,
                                           const std::vector<std::set<std::string>>& known) {
    std::vector<std::string> elems(working.begin(), working.end());
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i) + 1;

    SeedMap map(solver_.config(), elems.size());
    std::vector<int> reach;
    for (const auto& d : region)
      if (index.count(d)) reach.push_back(index[d]);
    map.add_clause(reach);

    std::vector<std::set<std::string>> found;
    auto block_mus = [&](const std::set<std::string>& m) {
      std::vector<int> c;
      for (const auto& e : m) c.push_back(-index.at(e));
      map.add_clause(c);
    };
    for (const auto& m : known) {
      found.push_back(m);
      block_mus(m);
    }

    const int budget_end = rep_.solver_calls + opts_.max_checks_per_round;
    while (found.size() < opts_.max_mus_per_round + known.size() && rep_.solver_calls < budget_end) {
      auto seed = map.solve();
      if (!seed) return found;
      std::set<std::string> s;
      for (std::size_t i = 0; i < elems.size(); ++i)
        if ((*seed)[i]) s.insert(elems[i]);
      SolverReply r = checker_.check(s, Query::Model);
      ++rep_.solver_calls;
      if (r.status == Status::Sat) {
        // Every subset of a satisfiable set is satisfiable: demand something
        // outside its maximal extension.
        const auto mss = grow(std::move(s), *r.model, working);
        std::vector<int> c;
        for (std::size_t i = 0; i < elems.size(); ++i)
          if (!mss.count(elems[i])) c.push_back(static_cast<int>(i) + 1);
        map.add_clause(c);
      } else if (r.status == Status::Unsat) {
        auto m = shrink_to_mus(checker_, r.core ? names_of(*r.core) : s, rep_.solver_calls);
        found.push_back(m);
        block_mus(m);
      } else {
        throw Error("solver returned unknown during core enumeration");
      }
    }
    rep_.complete = false;
    return found;
  }

  void run() {
    std::set<std::string> working;
    std::size_t soft_count = 0;
    for (const auto& c : b_.constraints) {
      working.insert(c.id);
      soft_count += c.soft() ? 1 : 0;
    }
    working.insert(std::string(kPinName));

    std::set<std::string> terms;
    const std::size_t max_rounds = soft_count + 1;
    while (rep_.rounds.size() < max_rounds) {
      SolverReply r = checker_.check(working);
      ++rep_.solver_calls;
      if (r.status == Status::Sat) {
        rep_.sat_reached = true;
        break;
      }
      if (r.status != Status::Unsat) throw Error("solver returned unknown during enumeration");
      auto mus = shrink_to_mus(checker_, r.core ? names_of(*r.core) : working, rep_.solver_calls);

      std::set<std::string> drop;
      for (const auto& n : mus)
        if (is_soft(n)) drop.insert(n);
      // A hard-only core is a law conflict under the pin: nothing may be
      // dropped, so the round is terminal and covers every remaining core.
      const bool terminal = drop.empty();
      auto cores = sweep(working, terminal ? working : drop, {mus});

      std::set<std::string> round;
      for (const auto& m : cores) round.insert(m.begin(), m.end());
      for (const auto& n : round)
        if (is_hard(n)) terms.insert(n);
      rep_.rounds.push_back(ids_in_order(b_, round));
      if (terminal) break;
      for (const auto& d : drop) working.erase(d);
    }

    std::map<std::string, std::vector<std::string>> by_group;
    for (const auto& c : b_.constraints)
      if (terms.count(c.id)) by_group[c.group].push_back(c.id);
    for (auto& [g, ids] : by_group) rep_.terms.push_back({g, std::move(ids)});
  }

 private:
  const ConstraintBundle& b_;
  const Solver& solver_;
  SubsetChecker checker_;
  Expr pin_;
  const EnumerationOptions& opts_;
  IllegalTermReport& rep_;
  std::map<std::string, const Expr*> formula_;
};

}  // namespace

IllegalTermReport enumerate_illegal_terms(const ConstraintBundle& b, const Solver& solver,
                                          const EnumerationOptions& opts) {
  const auto t0 = Clock::now();
  Verdict v = check_case_illegality(b, solver, false);
  if (v.status != Status::Unsat)
    throw PreconditionViolation("illegal-term enumeration requires an UNSAT case illegality check (got " +
                                std::string(status_name(v.status)) + ")");
  IllegalTermReport rep;
  rep.solver_calls = v.solver_calls;
  Enumerator(b, solver, opts, rep).run();
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

}  // namespace lexv
