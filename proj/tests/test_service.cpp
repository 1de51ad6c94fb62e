#include <doctest.h>

#include "lexv/json.hpp"
#include "lexv/service.hpp"
#include "support.hpp"

#include <httplib.h>

#include <functional>
#include <set>
#include <thread>

using namespace lexv;

namespace {

class Running {
 public:
  explicit Running(const std::filesystem::path& root, const std::function<void(ServiceConfig&)>& tweak = {}) {
    ServiceConfig cfg;
    cfg.store_root = root;
    cfg.solver = resolve_solver_config();
    if (tweak) tweak(cfg);
    svc_ = std::make_unique<Service>(cfg);
    port_ = svc_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { svc_->run(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(120, 0);
    for (int i = 0; i < 100 && !client_->Get("/health"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ~Running() {
    svc_->stop();
    thread_.join();
  }

  httplib::Client& http() { return *client_; }

  std::pair<int, json> post(const std::string& path, const json& body) {
    auto r = client_->Post(path, body.dump(), "application/json");
    REQUIRE(r);
    return {r->status, r->body.empty() ? json() : json::parse(r->body)};
  }
  std::pair<int, json> post_raw(const std::string& path, const std::string& body) {
    auto r = client_->Post(path, body, "application/json");
    REQUIRE(r);
    return {r->status, json::parse(r->body)};
  }
  std::pair<int, json> get(const std::string& path) {
    auto r = client_->Get(path);
    REQUIRE(r);
    return {r->status, json::parse(r->body)};
  }

 private:
  std::unique_ptr<Service> svc_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

json fsc_doc() { return json::parse(test::read_text(test::fixture("fsc_case.json"))); }
const std::string kCase = "fsc-2024-0712-insurance-capital";

std::set<std::string> groups(const json& verdict) {
  std::set<std::string> out;
  for (const auto& g : verdict["core_groups"]) out.insert(g.get<std::string>());
  return out;
}

}  // namespace

TEST_CASE("health and schema") {
  test::TempDir dir;
  Running s(dir.path());
  auto [st, health] = s.get("/health");
  CHECK(st == 200);
  CHECK(health["status"] == "ok");
  auto [st2, schema] = s.get("/schema");
  CHECK(st2 == 200);
  CHECK(schema["routes"].size() > 10);
}

TEST_CASE("case lifecycle and error statuses") {
  test::TempDir dir;
  Running s(dir.path());
  auto [created, ack] = s.post("/cases", fsc_doc());
  CHECK(created == 201);
  CHECK(ack["version"] == 1);
  CHECK(s.post("/cases", fsc_doc()).first == 409);
  auto [updated, ack2] = s.post("/cases", {{"bundle", fsc_doc()}, {"expected_version", 1}});
  CHECK(updated == 200);
  CHECK(ack2["version"] == 2);

  auto [st, rec] = s.get("/cases/" + kCase);
  CHECK(st == 200);
  CHECK(rec["version"] == 2);
  CHECK(rec["history"].size() == 2);
  CHECK(s.get("/cases").second["cases"].size() == 1);
  CHECK(s.get("/cases?prefix=zzz").second["cases"].empty());

  auto [ill, verdict] = s.post("/cases/" + kCase + "/check/illegality", json::object());
  CHECK(ill == 200);
  CHECK(verdict["status"] == "unsat");
  CHECK(verdict["version"] == 3);
  auto [law, lv] = s.post("/cases/" + kCase + "/check/consistency", json::object());
  CHECK(law == 200);
  CHECK(lv["status"] == "sat");
  auto [opt, corr] = s.post("/cases/" + kCase + "/optimize", {{"strategy", "core"}});
  CHECK(opt == 200);
  CHECK(corr["cost"] == 1);
  CHECK(corr["trace"].is_array());
  CHECK(s.get("/cases/" + kCase).second["latest"].contains("correction"));

  CHECK(s.get("/cases/nope").first == 404);
  CHECK(s.post("/cases/nope/check/illegality", json::object()).first == 404);
  CHECK(s.post_raw("/cases", "{not json").first == 400);
  CHECK(s.post("/cases/" + kCase + "/optimize", {{"strategy", "greedy"}}).first == 400);
  CHECK(s.post("/cases/" + kCase + "/optimize", {{"timeout_ms", -5}}).first == 400);

  auto broken = fsc_doc();
  broken["penalty_var"] = "absent";
  broken["case_id"] = "broken";
  auto [invalid, err] = s.post("/cases", broken);
  CHECK(invalid == 422);
  CHECK(err["error"] == "invalid_bundle");

  auto legal = fsc_doc();
  legal["case_id"] = "legal";
  legal["facts"]["improvement_plan_executed"] = true;
  for (auto& c : legal["constraints"])
    if (c["id"] == "plan_executed") c["expr"][2] = true;
  CHECK(s.post("/cases", legal).first == 201);
  CHECK(s.post("/cases/legal/illegal-terms", json::object()).first == 422);
}

TEST_CASE("what-if session from core groups to compliance") {
  test::TempDir dir;
  Running s(dir.path());
  REQUIRE(s.post("/cases", fsc_doc()).first == 201);

  auto [st, session] = s.post("/sessions", {{"case_id", kCase}});
  REQUIRE(st == 201);
  const std::string sid = session["session_id"];
  CHECK(session["version"] == 0);

  auto [r1, before] = s.post("/sessions/" + sid + "/run/illegality", json::object());
  CHECK(r1 == 200);
  CHECK(before["status"] == "unsat");
  const auto g = groups(before);
  for (const char* want : {"insurance:capital_level", "meta:penalty_conditions", "insurance:level_3_measures_executed"})
    CHECK(g.count(want));

  json toggle = {{"target", "plan_executed"}, {"action", "TOGGLE"}, {"expected_version", 0}};
  auto [m1, after_mod] = s.post("/sessions/" + sid + "/modify", toggle);
  CHECK(m1 == 200);
  CHECK(after_mod["version"] == 1);
  CHECK(s.post("/sessions/" + sid + "/modify", toggle).first == 409);
  CHECK(s.post("/sessions/" + sid + "/modify", {{"target", "ghost"}, {"action", "TOGGLE"}, {"expected_version", 1}})
            .first == 400);
  CHECK(s.post("/sessions/" + sid + "/modify", {{"target", "plan_executed"}, {"action", "TOGGLE"}}).first == 400);

  auto [r2, after] = s.post("/sessions/" + sid + "/run/illegality", json::object());
  CHECK(r2 == 200);
  CHECK(after["status"] == "sat");
  CHECK(after["session_version"] == 1);
  auto [r3, corr] = s.post("/sessions/" + sid + "/run/optimize", json::object());
  CHECK(r3 == 200);
  CHECK(corr["compliant"] == true);

  // The stored case is untouched until commit.
  CHECK(s.get("/cases/" + kCase).second["version"] == 1);
  auto [c, committed] = s.post("/sessions/" + sid + "/commit", json::object());
  CHECK(c == 200);
  CHECK(committed["version"] == 2);
  CHECK(s.post("/cases/" + kCase + "/check/illegality", json::object()).second["status"] == "sat");

  CHECK(s.get("/sessions/" + sid).second["results"].size() == 3);
  auto del = s.http().Delete("/sessions/" + sid);
  REQUIRE(del);
  CHECK(del->status == 204);
  CHECK(s.get("/sessions/" + sid).first == 404);
  CHECK(s.post("/sessions", {{"case_id", "nope"}}).first == 404);
}

TEST_CASE("retrieval routes") {
  test::TempDir dir;
  Running s(dir.path());
  json docs = json::array({{{"doc_id", "a"}, {"text", "capital adequacy ratio below fifty percent"}},
                           {{"doc_id", "b"}, {"text", "receiver appointed for the insurer"}},
                           {{"doc_id", "c"}, {"text", "capital improvement plan submitted"}}});
  auto [st, size] = s.post("/retrieval/corpus", {{"docs", docs}});
  CHECK(st == 200);
  CHECK(size["size"] == 3);
  auto [hs, hits] = s.post("/retrieval/search", {{"query", "capital plan"}, {"mode", "bm25"}});
  CHECK(hs == 200);
  REQUIRE(hits["results"].size() == 2);
  CHECK(hits["results"][0]["doc_id"] == "c");
  CHECK(hits["results"][0]["doc"]["text"] == "capital improvement plan submitted");
  CHECK(s.post("/retrieval/search", {{"query", "x"}, {"alpha", 2}}).first == 400);
  CHECK(s.post("/retrieval/search", json::object()).first == 400);
  auto [es, exp] = s.post("/retrieval/expand", {{"doc_id", "a"}, {"k", 3}});
  CHECK(es == 200);
  CHECK(exp["base"] == "a");
  CHECK(s.post("/retrieval/expand", {{"doc_id", "zzz"}}).first == 404);

  // Moving the blend weight to either end reproduces the pure rankings.
  for (const char* q : {"capital", "capital plan insurer", "receiver ratio"}) {
    CAPTURE(q);
    auto order = [&](const json& body) {
      std::vector<std::string> out;
      for (const auto& h : s.post("/retrieval/search", body).second["results"]) out.push_back(h["doc_id"]);
      return out;
    };
    CHECK(order({{"query", q}, {"alpha", 1.0}, {"k", 3}}) == order({{"query", q}, {"mode", "vector"}, {"k", 3}}));
    auto lexical = order({{"query", q}, {"mode", "bm25"}, {"k", 3}});
    auto blended = order({{"query", q}, {"alpha", 0.0}, {"k", 3}});
    blended.resize(lexical.size());
    CHECK(blended == lexical);
  }
}

TEST_CASE("an unreachable completion endpoint maps to 502") {
  test::TempDir dir;
  Running s(dir.path(), [](ServiceConfig& c) {
    c.llm = "live";
    c.llm_http = {"http://127.0.0.1:9/v1/chat/completions", "m", "LEXV_LLM_KEY", 1};
  });
  json docs = json::array({{{"doc_id", "a"}, {"text", "capital adequacy"}}});
  REQUIRE(s.post("/retrieval/corpus", {{"docs", docs}}).first == 200);
  auto [st, err] = s.post("/retrieval/expand", {{"doc_id", "a"}});
  CHECK(st == 502);
  CHECK(err["error"] == "llm_unavailable");
  CHECK(s.post("/synthesize", {{"case_text", "x"}, {"articles", json::object()}}).first == 502);
}

TEST_CASE("CORS preflight and allowlist") {
  test::TempDir dir;
  Running s(dir.path(), [](ServiceConfig& c) { c.cors_allowlist = {"http://ui.example"}; });
  httplib::Headers h = {{"Origin", "http://ui.example"}, {"Access-Control-Request-Method", "POST"}};
  auto pre = s.http().Options("/cases", h);
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Origin") == "http://ui.example");
  auto other = s.http().Get("/health", {{"Origin", "http://evil.example"}});
  REQUIRE(other);
  CHECK_FALSE(other->has_header("Access-Control-Allow-Origin"));
}
