#include <doctest.h>

#include "lexv/smtlib.hpp"
#include "support.hpp"

#include <cstdlib>
#include <fstream>

using namespace lexv;
using namespace lexv::ex;

TEST_CASE("illegality script matches the golden file byte for byte") {
  const auto b = test::fsc_bundle();
  const SmtScript s = emit_script(b, Mode::Illegality);
  const auto golden = test::fixture("smt/fsc_illegality.smt2");
  if (std::getenv("LEXV_UPDATE_GOLDEN")) std::ofstream(golden, std::ios::binary) << s.text;
  CHECK(s.text == test::read_text(golden));
}

TEST_CASE("emission is deterministic") {
  const auto b = test::fsc_bundle();
  for (Mode m : {Mode::Consistency, Mode::Illegality, Mode::Hardened, Mode::Relaxation}) {
    EmitOptions o;
    o.cost_bound = 3;
    CHECK(emit_script(b, m, o).text == emit_script(b, m, o).text);
  }
}

TEST_CASE("mode contents") {
  const auto b = test::fsc_bundle();
  auto cons = emit_script(b, Mode::Consistency);
  CHECK(cons.name_map.size() == 5);
  CHECK(cons.query == Query::Model);
  CHECK(cons.text.find("(get-model)") != std::string::npos);

  auto ill = emit_script(b, Mode::Illegality);
  CHECK(ill.name_map.size() == 11);
  CHECK(ill.name_map.at(std::string(kPinName)).origin == Origin::Pin);
  CHECK(ill.name_map.at("plan_executed").origin == Origin::Soft);
  CHECK(ill.text.find("(get-unsat-core)") != std::string::npos);

  EmitOptions o;
  o.cost_bound = 2;
  auto relax = emit_script(b, Mode::Relaxation, o);
  CHECK(relax.selectors.size() == 5);
  CHECK(relax.text.find("(or (= improvement_plan_executed false) lexv_sel_4)") != std::string::npos);
  CHECK(relax.name_map.count(std::string(kBoundName)));
  CHECK(relax.text.find("(* 2 (ite lexv_sel_0 1 0))") != std::string::npos);

  EmitOptions ex;
  ex.exclude = {"plan_executed"};
  ex.pin_penalty = true;
  auto hard = emit_script(b, Mode::Hardened, ex);
  CHECK_FALSE(hard.name_map.count("plan_executed"));
  CHECK(hard.name_map.count(std::string(kPinName)));
}

TEST_CASE("numerals") {
  CHECK(emit_number(Rational(5), Sort::Int) == "5");
  CHECK(emit_number(Rational(-5), Sort::Int) == "(- 5)");
  CHECK(emit_number(Rational(100), Sort::Real) == "100.0");
  CHECK(emit_number(Rational(11109, 100), Sort::Real) == "(/ 11109 100)");
  CHECK(emit_number(Rational(-1, 3), Sort::Real) == "(- (/ 1 3))");
}

TEST_CASE("Int literals are promoted under Real") {
  SortEnv env{{"r", Sort::Real}};
  CHECK(emit_expr(lt(v("r"), i(2)), env) == "(< r 2.0)");
}

TEST_CASE("model replies parse exactly") {
  const auto b = test::fsc_bundle();
  auto s = emit_script(b, Mode::Consistency);
  const std::string raw =
      "sat\n(\n  (define-fun own_capital () Real (/ 11109.0 100.0))\n"
      "  (define-fun net_worth () Real (- 2.5))\n  (define-fun capital_level () Int 3)\n"
      "  (define-fun penalty () Bool true)\n  (define-fun helper!0 ((x Int)) Int x)\n)\n";
  auto r = parse_reply(raw, s);
  CHECK(r.status == Status::Sat);
  REQUIRE(r.model);
  CHECK(r.model->at("own_capital") == Value::real(Rational(11109, 100)));
  CHECK(r.model->at("net_worth") == Value::real(Rational(-5, 2)));
  CHECK(r.model->at("capital_level") == Value::integer(3));
  CHECK(r.model->at("penalty") == Value::boolean(true));
  CHECK(r.model->at("l4_exec") == Value::boolean(false));  // omitted, defaulted
}

TEST_CASE("core replies map names back to constraints") {
  const auto b = test::fsc_bundle();
  auto s = emit_script(b, Mode::Illegality);
  auto r = parse_reply("unsat\n(c_l3_exec lexv_penalty_pin plan_executed)\n", s);
  CHECK(r.status == Status::Unsat);
  REQUIRE(r.core);
  REQUIRE(r.core->size() == 3);
  CHECK((*r.core)[0].group == "insurance:level_3_measures_executed");
  CHECK((*r.core)[1].origin == Origin::Pin);
  CHECK((*r.core)[2].origin == Origin::Soft);
}

TEST_CASE("malformed replies raise protocol errors") {
  const auto b = test::fsc_bundle();
  auto s = emit_script(b, Mode::Illegality);
  CHECK_THROWS_AS(parse_reply("", s), ProtocolError);
  CHECK_THROWS_AS(parse_reply("maybe\n", s), ProtocolError);
  CHECK_THROWS_AS(parse_reply("unsat\n(not_a_name)\n", s), ProtocolError);
  CHECK_THROWS_AS(parse_reply("(error \"line 3: unknown constant\")\n", s), ProtocolError);
  CHECK_THROWS_AS(parse_reply("unsat\n", s), ProtocolError);
  // A core query after sat is answered with an error, which is expected.
  auto r = parse_reply("sat\n(error \"unsat core is not available\")\n", s);
  CHECK(r.status == Status::Sat);
  CHECK(parse_reply("unknown\n", s).status == Status::Unknown);
}

TEST_CASE("unsupported model values") {
  CHECK_THROWS_AS(parse_model_value(parse_sexprs("(root-obj (+ x 1) 1)")[0], Sort::Real), ProtocolError);
  CHECK_THROWS_AS(parse_model_value(parse_sexprs("2.5")[0], Sort::Int), ProtocolError);
  CHECK(parse_model_value(parse_sexprs("(- 7)")[0], Sort::Int) == Value::integer(-7));
}
