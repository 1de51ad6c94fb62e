#include "lexv/generator.hpp"

#include "lexv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lexv {

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

long Rng::uniform_int(long lo, long hi) {
  if (hi <= lo) return lo;
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do x = next();
  while (x >= limit);
  return lo + static_cast<long>(x % span);
}

double Rng::normal(double mean, double sd) {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

struct Var {
  std::string name;
  Sort sort;
};

class CaseBuilder {
 public:
  CaseBuilder(const GenOptions& opts, std::size_t index)
      : opts_(opts), rng_(opts.seed * 0x2545F4914F6CDD1DULL + index + 1), index_(index) {}

  ConstraintBundle build();

 private:
  Expr number(Sort s, long k) const {
    return s == Sort::Int ? ex::i(k) : Expr::decimal_lit(Rational(k));
  }
  Value witness_value(Sort s) {
    switch (s) {
      case Sort::Bool: return Value::boolean(rng_.chance(0.5));
      case Sort::Int: return Value::integer(rng_.uniform_int(0, 10));
      case Sort::Real: return Value::real(Rational(rng_.uniform_int(0, 2000), 20));
    }
    return Value::zero(s);
  }
  const Var& pick(std::optional<Sort> sort = std::nullopt) {
    std::vector<const Var*> pool;
    for (const auto& v : vars_)
      if (!sort || v.sort == *sort) pool.push_back(&v);
    if (pool.empty())
      for (const auto& v : vars_) pool.push_back(&v);
    return *pool[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<long>(pool.size()) - 1))];
  }
  bool holds(const Expr& e) const { return eval_expr(e, witness_).as_bool(); }

  Expr atom();
  Expr law();
  Expr perturbed_pin(const Var& v, bool& perturbed);

  const GenOptions& opts_;
  Rng rng_;
  std::size_t index_;
  std::vector<Var> vars_;  // excluding the penalty variable
  Assignment witness_;
};

Expr CaseBuilder::atom() {
  const Var& v = pick();
  if (v.sort == Sort::Bool) return rng_.chance(0.5) ? ex::v(v.name) : ex::lnot(ex::v(v.name));
  static const Op ops[] = {Op::Lt, Op::Le, Op::Gt, Op::Ge, Op::Eq};
  Op op = ops[rng_.uniform_int(0, 4)];
  Expr lhs = ex::v(v.name);
  if (v.sort == Sort::Real && rng_.chance(0.5)) {
    const Var& w = pick(Sort::Real);
    if (w.name != v.name) lhs = ex::add({ex::mul(number(Sort::Real, rng_.uniform_int(1, 3)), ex::v(v.name)), ex::v(w.name)});
  }
  if (op == Op::Eq && v.sort == Sort::Real) op = Op::Le;
  Value wv = eval_expr(lhs, witness_);
  long centre = static_cast<long>(std::floor(wv.as_number().convert_to<double>()));
  long k = centre + rng_.uniform_int(-3, 3);
  return Expr::make(op, {lhs, number(v.sort, k)});
}

Expr CaseBuilder::law() {
  Expr e = ex::t();
  switch (rng_.uniform_int(0, 3)) {
    case 0: e = ex::implies(atom(), atom()); break;
    case 1: e = ex::lor({atom(), atom()}); break;
    case 2: {
      const Var& b = pick(Sort::Bool);
      e = b.sort == Sort::Bool ? ex::iff(ex::v(b.name), ex::land({atom(), atom()})) : ex::implies(atom(), atom());
      break;
    }
    default: e = ex::implies(ex::land({atom(), atom()}), atom()); break;
  }
  return holds(e) ? e : ex::lnot(e);
}

Expr CaseBuilder::perturbed_pin(const Var& v, bool& perturbed) {
  Value val = witness_.at(v.name);
  perturbed = rng_.chance(0.4);
  if (perturbed) {
    switch (v.sort) {
      case Sort::Bool: val = Value::boolean(!val.as_bool()); break;
      case Sort::Int: val = Value::integer(numerator(val.as_number()) + (rng_.chance(0.5) ? 1 : -1) * rng_.uniform_int(1, 4)); break;
      case Sort::Real: val = Value::real(val.as_number() + Rational(rng_.uniform_int(-100, 100), 10)); break;
    }
  }
  if (v.sort == Sort::Bool) return val.as_bool() ? ex::v(v.name) : ex::lnot(ex::v(v.name));
  Expr lit = v.sort == Sort::Int ? Expr::int_lit(numerator(val.as_number())) : Expr::decimal_lit(val.as_number());
  return ex::eq(ex::v(v.name), lit);
}

ConstraintBundle CaseBuilder::build() {
  const bool compact = opts_.max_constraints > 0 && opts_.max_constraints <= 12;
  long nv, nc;
  if (compact) {
    nv = rng_.uniform_int(2, 4);
    nc = rng_.uniform_int(3, static_cast<long>(opts_.max_constraints));
  } else {
    nv = std::clamp(std::lround(rng_.normal(opts_.var_mean, opts_.var_sd)), opts_.var_min, opts_.var_max);
    nc = std::clamp(std::lround(rng_.normal(opts_.constraint_mean, opts_.constraint_sd)), opts_.constraint_min,
                    opts_.constraint_max);
    if (opts_.max_constraints > 0) nc = std::min<long>(nc, static_cast<long>(opts_.max_constraints));
  }
  long n_hard = std::max(2L, std::lround(opts_.hard_ratio * static_cast<double>(nc)));
  long n_soft = std::max(1L, nc - n_hard);
  if (opts_.max_soft > 0) n_soft = std::min<long>(n_soft, static_cast<long>(opts_.max_soft));
  if (compact) n_hard = std::max(1L, std::min(n_hard, static_cast<long>(opts_.max_constraints) - n_soft));

  ConstraintBundle b;
  char id[32];
  std::snprintf(id, sizeof id, "gen-%llu-%04zu", static_cast<unsigned long long>(opts_.seed), index_);
  b.case_id = id;
  b.penalty_var = "penalty";
  b.meta["generator"] = "gen-cases";

  for (long i = 0; i < nv - 1; ++i) {
    double r = rng_.uniform01();
    Sort s = r < 0.5 ? Sort::Bool : r < 0.75 ? Sort::Int : Sort::Real;
    vars_.push_back({"v" + std::to_string(i), s});
  }
  for (const auto& v : vars_) {
    witness_.emplace(v.name, witness_value(v.sort));
    b.vars.push_back({v.name, v.sort, "gen:" + v.name});
  }
  witness_.emplace("penalty", Value::boolean(false));
  b.vars.push_back({"penalty", Sort::Bool, "meta:penalty"});

  // Penalty fires on any trigger; triggers are false under the witness.
  std::vector<Expr> triggers;
  for (long i = rng_.uniform_int(1, 3); i > 0; --i) {
    Expr a = ex::land({atom(), atom()});
    triggers.push_back(holds(a) ? ex::lnot(a) : a);
  }
  b.constraints.push_back({"h_penalty", Kind::Hard, ex::iff(ex::v("penalty"), ex::lor(triggers)), 0,
                           "meta:penalty_conditions", {}});
  for (long i = 1; i < n_hard; ++i)
    b.constraints.push_back({"h" + std::to_string(i), Kind::Hard, law(), 0, "law:g" + std::to_string((i + 1) / 2), {}});

  std::vector<const Var*> order;
  for (const auto& v : vars_) order.push_back(&v);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<long>(i) - 1))]);
  for (long i = 0; i < n_soft; ++i) {
    Constraint c;
    c.kind = Kind::Soft;
    c.weight = rng_.uniform_int(opts_.min_weight, opts_.max_weight);
    c.id = "s" + std::to_string(i);
    if (static_cast<std::size_t>(i) < order.size()) {
      bool perturbed = false;
      c.expr = perturbed_pin(*order[static_cast<std::size_t>(i)], perturbed);
      c.group = "fact:" + order[static_cast<std::size_t>(i)]->name;
    } else {
      Expr a = atom();
      c.expr = rng_.chance(0.6) ? (holds(a) ? a : ex::lnot(a)) : (holds(a) ? ex::lnot(a) : a);
      c.group = "fact:derived";
    }
    b.constraints.push_back(std::move(c));
  }
  return b;
}

}  // namespace

ConstraintBundle generate_case(const GenOptions& opts, std::size_t index) {
  return CaseBuilder(opts, index).build();
}

std::vector<ConstraintBundle> generate_cases(const GenOptions& opts) {
  std::vector<ConstraintBundle> out;
  out.reserve(opts.n);
  for (std::size_t i = 0; i < opts.n; ++i) out.push_back(generate_case(opts, i));
  return out;
}

}  // namespace lexv
