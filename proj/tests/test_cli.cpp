#include <doctest.h>

#include "lexv/json.hpp"
#include "support.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

using namespace lexv;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

std::string cli() {
  const char* p = std::getenv("LEXV_CLI");
  REQUIRE_MESSAGE(p, "LEXV_CLI must name the lexverify binary");
  return p;
}

Outcome run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " 2>/dev/null";
  FILE* f = ::popen(cmd.c_str(), "r");
  REQUIRE(f);
  Outcome o;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), f)) o.out.append(buf.data(), n);
  const int status = ::pclose(f);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string fsc() { return test::fixture("fsc_case.json").string(); }

}  // namespace

TEST_CASE("verdict commands") {
  auto law = run("check-law " + fsc());
  CHECK(law.code == 0);
  CHECK(json::parse(law.out)["status"] == "sat");

  auto c = run("check-case " + fsc());
  CHECK(c.code == 0);
  auto v = json::parse(c.out);
  CHECK(v["status"] == "unsat");
  CHECK(v["core_minimal"] == true);

  auto opt = run("optimize --strategy core " + fsc());
  CHECK(opt.code == 0);
  CHECK(json::parse(opt.out)["cost"] == 1);
  auto weighted = run("optimize --weight-override plan_executed=5 " + fsc());
  CHECK(weighted.code == 0);
  CHECK(json::parse(weighted.out)["cost"] == 2);

  auto terms = run("illegal-terms " + fsc());
  CHECK(terms.code == 0);
  CHECK(json::parse(terms.out)["sat_reached"] == true);
}

TEST_CASE("contrary verdicts exit 2") {
  test::TempDir dir;
  auto j = json::parse(test::read_text(fsc()));
  j["facts"]["improvement_plan_executed"] = true;
  for (auto& c : j["constraints"])
    if (c["id"] == "plan_executed") c["expr"][2] = true;
  const auto legal = dir.path() / "legal.json";
  {
    std::ofstream out(legal);
    out << j.dump();
  }
  CHECK(run("check-case " + legal.string()).code == 2);
  CHECK(run("illegal-terms " + legal.string()).code == 2);
  CHECK(run("optimize " + legal.string()).code == 0);
}

TEST_CASE("usage and validation errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("no-such-command").code == 1);
  CHECK(run("check-case /nonexistent.json").code == 1);
  CHECK(run("optimize --weight-override bad " + fsc()).code == 1);
  CHECK(run("validate " + fsc()).code == 0);
  test::TempDir dir;
  auto j = json::parse(test::read_text(fsc()));
  j["penalty_var"] = "absent";
  const auto bad = dir.path() / "bad.json";
  {
    std::ofstream out(bad);
    out << j.dump();
  }
  auto v = run("validate " + bad.string());
  CHECK(v.code == 1);
  CHECK(run("check-case " + bad.string()).code == 1);
}

TEST_CASE("solver failures exit 3") {
  test::TempDir dir;
  const auto crash = test::write_script(dir.path(), "crash.sh", "exit 9\n");
  const auto junk = test::write_script(dir.path(), "junk.sh", "cat >/dev/null; echo banana\n");
  CHECK(run("--solver " + crash.string() + " check-case " + fsc()).code == 3);
  CHECK(run("--solver " + junk.string() + " check-case " + fsc()).code == 3);
  CHECK(run("--solver /nonexistent/solver check-law " + fsc()).code == 3);
}

TEST_CASE("parser, search and generator commands") {
  auto ex = run("extract-articles " + test::fixture("parser/en_insurance.txt").string());
  CHECK(ex.code == 0);
  CHECK(json::parse(ex.out).size() == 2);

  test::TempDir dir;
  const auto corpus = dir.path() / "corpus.jsonl";
  {
    std::ofstream out(corpus);
    out << R"({"doc_id":"a","text":"capital plan"})" << "\n" << R"({"doc_id":"b","text":"receiver"})" << "\n";
  }
  auto s = run("search capital --corpus " + corpus.string() + " -k 1");
  CHECK(s.code == 0);
  CHECK(s.out.find("\"a\"") != std::string::npos);

  auto g1 = run("gen-cases --n 3 --seed 5");
  auto g2 = run("gen-cases --n 3 --seed 5");
  CHECK(g1.code == 0);
  CHECK(g1.out == g2.out);
  CHECK(json::parse(g1.out).size() == 3);
}
