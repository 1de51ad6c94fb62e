#include <doctest.h>

#include "lexv/maxsmt.hpp"
#include "lexv/verification.hpp"
#include "lexv/whatif.hpp"
#include "support.hpp"

using namespace lexv;

namespace {

ModifyRequest request(const std::string& target, ModifyAction a) {
  ModifyRequest r;
  r.target = target;
  r.action = a;
  return r;
}

}  // namespace

TEST_CASE("toggling the execution fact makes the case compliant") {
  const auto b = test::fsc_bundle();
  for (const std::string target : {"plan_executed", "improvement_plan_executed"}) {
    CAPTURE(target);
    auto m = apply_modify(b, request(target, ModifyAction::Toggle));
    auto f = fact_literal(*m.find_constraint("plan_executed"), m.sort_env());
    REQUIRE(f);
    CHECK(f->value.as_bool());
    CHECK_FALSE(m.facts.count("improvement_plan_executed"));
    CHECK(asserted_facts(m).at("improvement_plan_executed").as_bool());
    CHECK(check_case_illegality(m, test::solver()).status == Status::Sat);
    CHECK(minimize_violation(m, test::solver()).cost == 0);
  }
  // The input is never edited in place.
  CHECK(bundle_to_json(b) == bundle_to_json(test::fsc_bundle()));
}

TEST_CASE("toggling a non-literal flips its kind") {
  const auto b = test::fsc_bundle();
  auto soft = apply_modify(b, request("c_l3_exec", ModifyAction::Toggle));
  CHECK(soft.find_constraint("c_l3_exec")->soft());
  CHECK(soft.find_constraint("c_l3_exec")->weight == kDefaultSoftWeight);
  auto back = apply_modify(soft, request("c_l3_exec", ModifyAction::Toggle));
  CHECK(back.find_constraint("c_l3_exec")->hard());
  CHECK(back.find_constraint("c_l3_exec")->weight == 0);
}

TEST_CASE("fixing a value replaces the pin") {
  const auto b = test::fsc_bundle();
  auto r = request("own_capital", ModifyAction::FixValue);
  r.value = "210.5";
  auto m = apply_modify(b, r);
  auto f = fact_literal(*m.find_constraint("fact_own_capital"), m.sort_env());
  REQUIRE(f);
  CHECK(f->value == Value::real(*parse_decimal("210.5")));
  CHECK(m.constraints.size() == b.constraints.size());

  // A fresh pin is added when no fact constrains the variable.
  auto p = request("person_removed", ModifyAction::FixValue);
  p.value = true;
  auto added = apply_modify(b, p);
  REQUIRE(added.find_constraint("fact_person_removed"));
  CHECK(added.find_constraint("fact_person_removed")->soft());
  CHECK(added.constraints.size() == b.constraints.size() + 1);

  p.value = "yes";
  CHECK_THROWS_AS(apply_modify(b, p), ModifyError);
  auto def = request("c_capital_level", ModifyAction::FixValue);
  def.value = 1;
  CHECK_THROWS_AS(apply_modify(b, def), ModifyError);
}

TEST_CASE("injecting a parameter declares and pins it") {
  const auto b = test::fsc_bundle();
  auto r = request("grace_days", ModifyAction::InjectParameter);
  r.value = 30;
  CHECK_THROWS_AS(apply_modify(b, r), ModifyError);  // new variable needs a sort
  r.sort = Sort::Int;
  auto m = apply_modify(b, r);
  REQUIRE(m.find_var("grace_days"));
  const Constraint* c = m.find_constraint("param_grace_days");
  REQUIRE(c);
  CHECK(c->hard());
  r.value = 45;
  auto again = apply_modify(m, r);
  CHECK(again.constraints.size() == m.constraints.size());
  r.sort = Sort::Bool;
  CHECK_THROWS_AS(apply_modify(m, r), ModifyError);
  auto bad = request("2x", ModifyAction::InjectParameter);
  bad.value = 1;
  bad.sort = Sort::Int;
  CHECK_THROWS_AS(apply_modify(b, bad), ModifyError);
}

TEST_CASE("weights and kinds") {
  const auto b = test::fsc_bundle();
  auto w = request("plan_submitted", ModifyAction::SetWeight);
  w.weight = 7;
  CHECK(apply_modify(b, w).find_constraint("plan_submitted")->weight == 7);
  w.weight = 0;
  CHECK_THROWS_AS(apply_modify(b, w), ModifyError);
  w.target = "c_l2_exec";
  w.weight = 2;
  CHECK_THROWS_AS(apply_modify(b, w), ModifyError);

  auto k = request("plan_submitted", ModifyAction::SetKind);
  k.kind = Kind::Hard;
  auto hard = apply_modify(b, k);
  CHECK(hard.find_constraint("plan_submitted")->hard());
  k.kind = Kind::Soft;
  k.weight = 3;
  CHECK(apply_modify(hard, k).find_constraint("plan_submitted")->weight == 3);
  CHECK_THROWS_AS(apply_modify(b, request("nope", ModifyAction::Toggle)), ModifyError);
  CHECK_THROWS_AS(apply_modify(b, request("capital_level", ModifyAction::Toggle)), ModifyError);
}

TEST_CASE("request parsing") {
  auto r = modify_request_from_json(json::parse(R"({"target": "plan_executed", "action": "TOGGLE", "expected_version": 0})"));
  CHECK(r.action == ModifyAction::Toggle);
  CHECK(*r.expected_version == 0);
  CHECK(modify_request_from_json(to_json(r)).target == "plan_executed");
  auto k = modify_request_from_json(
      json::parse(R"({"target": "x", "action": "SET_KIND", "kind": "soft", "weight": 2, "expected_version": 3})"));
  CHECK(*k.kind == Kind::Soft);
  CHECK(*k.weight == 2);
  for (const char* bad : {R"({"target": "x", "action": "TOGGLE"})",
                          R"({"target": "x", "action": "FLIP", "expected_version": 0})",
                          R"({"action": "TOGGLE", "expected_version": 0})",
                          R"({"target": "x", "action": "FIX_VALUE", "expected_version": 0})",
                          R"({"target": "x", "action": "SET_WEIGHT", "expected_version": 0})",
                          R"({"target": "x", "action": "SET_KIND", "kind": "medium", "expected_version": 0})",
                          R"([1, 2])"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(modify_request_from_json(json::parse(bad)), FormatError);
  }
}
