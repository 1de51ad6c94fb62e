#include <doctest.h>

#include "lexv/json.hpp"
#include "lexv/llm.hpp"
#include "lexv/prompts.hpp"
#include "support.hpp"

#include <algorithm>

using namespace lexv;

namespace {

std::string fsc_json() { return test::read_text(test::fixture("fsc_case.json")); }

std::string legal_fsc_json() {
  auto j = json::parse(fsc_json());
  for (auto& c : j["constraints"])
    if (c["id"] == "plan_executed") c["expr"][2] = true;
  j["facts"]["improvement_plan_executed"] = true;
  return j.dump();
}

ArticleMap articles() {
  return extract_articles(test::read_text(test::fixture("parser/en_insurance.txt")), default_patterns("en"));
}

Doc article_doc() {
  return {"ins-143-6", "Measures for inadequate capital\n1. Capital inadequate: order an improvement plan. Then more.\n"
                       "2. Significantly inadequate: remove the responsible person.",
          "Insurance Act", "143-6", "Measures for inadequate capital"};
}

}  // namespace

TEST_CASE("every template declares its task and a payload block") {
  const auto& all = prompt_templates();
  REQUIRE(all.size() == 5);
  for (const auto& t : all) {
    CAPTURE(t.name);
    CHECK(prompt_task(t.text) == std::string(t.name));
    CHECK(t.text.find("### version:") != std::string_view::npos);
    CHECK(t.text.find("{{payload}}") != std::string_view::npos);
  }
  CHECK_THROWS(render_prompt("nope", {}));
  CHECK_THROWS(render_prompt("gen_queries", {}));
  auto p = render_prompt("gen_queries", {{"payload", "{\"x\": 1}"}});
  CHECK(prompt_payload(p) == "{\"x\": 1}");
}

TEST_CASE("mock query generation") {
  MockCompletionPort mock;
  auto qs = gen_queries(article_doc(), mock);
  REQUIRE(qs.size() == 3);
  CHECK(qs[0] == "Measures for inadequate capital");
  CHECK(qs[1] == "Capital inadequate: order an improvement plan");
  CHECK(qs[2] == "Significantly inadequate: remove the responsible person");
}

TEST_CASE("empty generation retries once with a new seed") {
  ScriptedCompletionPort empty({"[]"});
  CHECK_THROWS_AS(gen_queries(article_doc(), empty), EmptyGeneration);
  CHECK(empty.calls() == 2);

  ScriptedCompletionPort second({"[]", "[\"capital\", \"capital\", \"\"]"});
  CHECK(gen_queries(article_doc(), second) == std::vector<std::string>{"capital"});
}

TEST_CASE("mock usefulness filter keeps docs sharing content words") {
  MockCompletionPort mock;
  std::vector<Doc> docs = {{"a", "The capital ratio is computed quarterly.", "", "", ""},
                           {"b", "Fishing licences expire yearly.", "", "", ""},
                           {"c", "A receiver may be appointed.", "", "", ""}};
  auto kept = filter_useful(docs, article_doc(), mock);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].doc_id == "a");

  ScriptedCompletionPort invents({"[\"c\", \"zzz\", \"a\"]"});
  auto subset = filter_useful(docs, article_doc(), invents);
  REQUIRE(subset.size() == 2);
  CHECK(subset[0].doc_id == "a");  // input order, unknown ids ignored
  CHECK(subset[1].doc_id == "c");
}

TEST_CASE("content words") {
  auto w = content_words("The company shall submit 3 plans to the regulator");
  CHECK(std::find(w.begin(), w.end(), "company") != w.end());
  CHECK(std::find(w.begin(), w.end(), "the") == w.end());
  CHECK(std::find(w.begin(), w.end(), "3") == w.end());
}

TEST_CASE("trace phrasing") {
  MockCompletionPort mock;
  CHECK(phrase_trace_line("plan: false → true", mock) == "plan: false → true");
  ScriptedCompletionPort blank({""});
  CHECK(phrase_trace_line("keep me", blank) == "keep me");
}

TEST_CASE("synthesis accepted on the first attempt") {
  ScriptedCompletionPort port({"```json\n" + fsc_json() + "\n```"});
  auto r = synthesize_bundle("case narrative", articles(), port, test::solver());
  REQUIRE(r.attempts.size() == 1);
  CHECK(r.attempts[0].accepted);
  CHECK(r.bundle.case_id == "fsc-2024-0712-insurance-capital");
  CHECK(prompt_task(port.prompts()[0]) == "synthesize");
  CHECK(port.prompts()[0].find("143-6") != std::string::npos);
}

TEST_CASE("synthesis repaired on the second attempt") {
  ScriptedCompletionPort port({"I think the answer is obvious.", fsc_json()});
  auto r = synthesize_bundle("case narrative", articles(), port, test::solver());
  REQUIRE(r.attempts.size() == 2);
  CHECK_FALSE(r.attempts[0].accepted);
  CHECK(r.attempts[0].feedback().rfind("parse error:", 0) == 0);
  CHECK(r.attempts[1].accepted);
  const std::string repair = port.prompts()[1];
  CHECK(prompt_task(repair) == "repair");
  CHECK(repair.find(r.attempts[0].feedback()) != std::string::npos);
  CHECK(repair.find("I think the answer is obvious.") != std::string::npos);
}

TEST_CASE("synthesis exhausted after three attempts") {
  auto invalid = json::parse(fsc_json());
  invalid["penalty_var"] = "no_such_var";
  ScriptedCompletionPort port({"{", invalid.dump(), legal_fsc_json()});
  try {
    synthesize_bundle("case narrative", articles(), port, test::solver());
    FAIL("expected SynthesisExhausted");
  } catch (const SynthesisExhausted& e) {
    REQUIRE(e.attempts().size() == 3);
    CHECK_FALSE(e.attempts()[0].parse_error.empty());
    CHECK_FALSE(e.attempts()[1].validation_errors.empty());
    CHECK(e.attempts()[2].solver_feedback.find("expected unsat") != std::string::npos);
    CHECK(port.prompts()[2].find("MissingPenaltyVar") != std::string::npos);
  }
  CHECK(port.calls() == 3);
}

TEST_CASE("inconsistent law is fed back with its core") {
  auto j = json::parse(fsc_json());
  j["constraints"].push_back({{"id", "c_contra"}, {"kind", "HARD"}, {"group", "x"}, {"expr", json::array({"<", "risk_capital", "0"})}});
  ScriptedCompletionPort port({j.dump()});
  SynthesisOptions o;
  o.max_repair_rounds = 1;
  try {
    synthesize_bundle("case", articles(), port, test::solver(), o);
    FAIL("expected SynthesisExhausted");
  } catch (const SynthesisExhausted& e) {
    CHECK(e.attempts()[0].solver_feedback.find("c_contra") != std::string::npos);
    CHECK(to_json(e.attempts()[0])["attempt"] == 1);
  }
}

TEST_CASE("mock synthesis reads the json block of the case text") {
  MockCompletionPort mock;
  auto r = synthesize_bundle("Narrative.\n```json\n" + fsc_json() + "```\n", articles(), mock, test::solver());
  CHECK(r.attempts.size() == 1);
}

TEST_CASE("chat completion wire format") {
  CompletionParams p;
  p.seed = 11;
  auto body = HttpCompletionPort::request_body("m-1", "hello", p);
  CHECK(body["model"] == "m-1");
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"] == "hello");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["seed"] == 11);
  CHECK(HttpCompletionPort::parse_response(R"({"choices":[{"message":{"content":"hi"}}]})") == "hi");
  CHECK_THROWS_AS(HttpCompletionPort::parse_response("<html>"), LlmError);
  CHECK_THROWS_AS(HttpCompletionPort::parse_response(R"({"choices":[]})"), LlmError);
  HttpCompletionPort unreachable({"http://127.0.0.1:9/v1/chat", "m", "LEXV_LLM_KEY", 1});
  CHECK_THROWS_AS(unreachable.complete("x", {}), LlmError);
}
