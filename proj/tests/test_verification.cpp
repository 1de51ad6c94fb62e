#include <doctest.h>

#include "lexv/generator.hpp"
#include "lexv/verification.hpp"
#include "support.hpp"

#include <algorithm>

using namespace lexv;
using namespace lexv::ex;

namespace {

ConstraintBundle legal_fsc() {
  auto b = test::fsc_bundle();
  b.find_constraint("plan_executed")->expr = eq(v("improvement_plan_executed"), t());
  return b;
}

}  // namespace

TEST_CASE("worked case is illegal with the three responsible groups") {
  auto v = check_case_illegality(test::fsc_bundle(), test::solver());
  CHECK(v.status == Status::Unsat);
  CHECK(v.core_minimal);
  auto groups = v.core_groups();
  CHECK(groups.count("insurance:capital_level"));
  CHECK(groups.count("meta:penalty_conditions"));
  CHECK(groups.count("insurance:level_3_measures_executed"));
  CHECK(v.core_ids().count("plan_executed"));
}

TEST_CASE("reported core is minimal") {
  const auto b = test::fsc_bundle();
  auto v = check_case_illegality(b, test::solver());
  std::set<std::string> core;
  for (const auto& m : v.core) core.insert(m.name);
  CHECK(check_subset(b, core, test::solver()).status == Status::Unsat);
  for (const auto& drop : core) {
    auto smaller = core;
    smaller.erase(drop);
    CAPTURE(drop);
    CHECK(check_subset(b, smaller, test::solver()).status == Status::Sat);
  }
}

TEST_CASE("law base of the worked case is consistent") {
  auto v = check_law_consistency(test::fsc_bundle(), test::solver());
  CHECK(v.status == Status::Sat);
  REQUIRE(v.model);
  CHECK(v.model->count("capital_level"));
}

TEST_CASE("inconsistent law yields a minimal core of hard constraints") {
  auto b = test::fsc_bundle();
  b.constraints.push_back({"c_bad_a", Kind::Hard, gt(v("net_worth"), i(5)), 0, "law:bad", {}});
  b.constraints.push_back({"c_bad_b", Kind::Hard, lt(v("net_worth"), i(1)), 0, "law:bad", {}});
  auto v = check_law_consistency(b, test::solver());
  CHECK(v.status == Status::Unsat);
  CHECK(v.core_ids() == std::set<std::string>{"c_bad_a", "c_bad_b"});
}

TEST_CASE("a compliant case is SAT") {
  auto v = check_case_illegality(legal_fsc(), test::solver());
  CHECK(v.status == Status::Sat);
  CHECK(v.core.empty());
}

TEST_CASE("illegal terms of the worked case") {
  const auto b = test::fsc_bundle();
  auto rep = enumerate_illegal_terms(b, test::solver());
  CHECK(rep.sat_reached);
  CHECK(rep.complete);
  CHECK(rep.rounds.size() <= b.soft().size() + 1);
  CHECK(rep.term_groups().count("insurance:capital_level"));
  CHECK(rep.term_groups().count("meta:penalty_conditions"));
  CHECK(rep.term_ids() == test::brute_force_term_union(b));
}

TEST_CASE("enumeration requires an illegal case") {
  CHECK_THROWS_AS(enumerate_illegal_terms(legal_fsc(), test::solver()), PreconditionViolation);
}

TEST_CASE("enumeration matches the exhaustive oracle on small bundles") {
  GenOptions o;
  o.n = 12;
  o.seed = 101;
  o.max_constraints = 8;
  int compared = 0;
  for (const auto& b : generate_cases(o)) {
    CAPTURE(b.case_id);
    REQUIRE(b.constraints.size() <= 8);
    if (check_case_illegality(b, test::solver(), false).status != Status::Unsat) continue;
    auto rep = enumerate_illegal_terms(b, test::solver());
    CHECK(rep.complete);
    CHECK(rep.rounds.size() <= b.soft().size() + 1);
    CHECK(rep.term_ids() == test::brute_force_term_union(b));
    ++compared;
  }
  CHECK(compared >= 6);
}

TEST_CASE("shrinking through the incremental checker gives the same kind of result") {
  const auto b = test::fsc_bundle();
  std::set<std::string> all{std::string(kPinName)};
  for (const auto& c : b.constraints) all.insert(c.id);
  SubsetChecker checker(b, test::solver());
  int calls = 0;
  auto mus = shrink_to_mus(checker, all, calls);
  CHECK(calls > 0);
  auto muses = test::brute_force_muses(b);
  CHECK(std::find(muses.begin(), muses.end(), mus) != muses.end());
}

TEST_CASE("check budget marks a round incomplete") {
  EnumerationOptions o;
  o.max_checks_per_round = 1;
  auto rep = enumerate_illegal_terms(test::fsc_bundle(), test::solver(), o);
  CHECK_FALSE(rep.complete);
}
