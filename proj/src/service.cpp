#include "lexv/service.hpp"

#include "lexv/case_store.hpp"
#include "lexv/json.hpp"
#include "lexv/report.hpp"
#include "lexv/retrieval.hpp"
#include "lexv/verification.hpp"
#include "lexv/whatif.hpp"

#include <httplib.h>

#include <cstdlib>
#include <random>
#include <shared_mutex>

namespace lexv {

namespace {

struct HttpError : Error {
  HttpError(int status, std::string code, const std::string& msg, json details = nullptr)
      : Error(msg), status(status), code(std::move(code)), details(std::move(details)) {}
  int status;
  std::string code;
  json details;
};

struct Session {
  std::string id;
  std::string case_id;
  long base_version = 0;
  ConstraintBundle working;
  long version = 0;
  json applied = json::array();
  json results = json::array();
  std::mutex mu;
};

std::string random_token() {
  static std::mutex mu;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(gen()),
                static_cast<unsigned long long>(gen()));
  return buf;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw HttpError(400, "bad_json", "request body is not valid JSON");
  if (!j.is_object()) throw HttpError(400, "bad_request", "request body must be a JSON object");
  return j;
}

template <class T>
T optional_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw HttpError(400, "bad_request", std::string("field '") + key + "' has the wrong type");
  }
}

json validation_details(const std::vector<ValidationError>& errs) {
  json out = json::array();
  for (const auto& e : errs) out.push_back({{"code", code_name(e.code)}, {"subject", e.subject}, {"message", e.message}});
  return out;
}

json route(const char* method, const char* path, const char* body, const char* returns) {
  return {{"method", method}, {"path", path}, {"body", body}, {"returns", returns}};
}

json service_schema() {
  json modify = {
      {"$schema", "http://json-schema.org/draft-07/schema#"},
      {"title", "ModifyRequest"},
      {"type", "object"},
      {"required", {"target", "action", "expected_version"}},
      {"properties",
       {{"target", {{"type", "string"}, {"description", "constraint id or variable name"}}},
        {"action", {{"enum", {"TOGGLE", "FIX_VALUE", "INJECT_PARAMETER", "SET_WEIGHT", "SET_KIND"}}}},
        {"value", {{"description", "FIX_VALUE / INJECT_PARAMETER value; Bool as JSON boolean, numbers as JSON "
                                    "integers or decimal strings"}}},
        {"name", {{"type", "string"}}},
        {"sort", {{"enum", {"Bool", "Int", "Real"}}}},
        {"weight", {{"type", "integer"}, {"minimum", 1}}},
        {"kind", {{"enum", {"HARD", "SOFT"}}}},
        {"expected_version", {{"type", "integer"}, {"description", "session version the edit applies to"}}}}}};
  json routes = json::array({
      route("GET", "/schema", "-", "this document"),
      route("GET", "/health", "-", "{status, solver}"),
      route("POST", "/cases", "bundle, or {bundle, expected_version}", "{case_id, version}"),
      route("GET", "/cases", "query: prefix", "[{case_id, version, constraints, latest_kinds}]"),
      route("GET", "/cases/{id}", "-", "{case_id, version, bundle, history, latest}"),
      route("POST", "/cases/{id}/check/consistency", "{timeout_ms?}", "Verdict + {case_id, version}"),
      route("POST", "/cases/{id}/check/illegality", "{timeout_ms?}", "Verdict + {case_id, version}"),
      route("POST", "/cases/{id}/illegal-terms", "{timeout_ms?}", "IllegalTermReport + {case_id, version}"),
      route("POST", "/cases/{id}/optimize", "{strategy?: linear|core, weight_override?: {key: factor}, phrase?: bool}",
            "CorrectionResult + trace + {case_id, version}"),
      route("POST", "/sessions", "{case_id}", "Session"),
      route("GET", "/sessions/{sid}", "-", "Session"),
      route("POST", "/sessions/{sid}/modify", "ModifyRequest", "Session"),
      route("POST", "/sessions/{sid}/run/{check|illegality|consistency|illegal-terms|optimize}", "as the case routes",
            "result + {session_id, session_version}"),
      route("POST", "/sessions/{sid}/commit", "-", "{case_id, version}"),
      route("DELETE", "/sessions/{sid}", "-", "204"),
      route("POST", "/retrieval/corpus", "{docs: [Doc]}", "{size}"),
      route("POST", "/retrieval/search", "{query, alpha?, k?, mode?: hybrid|bm25|vector}", "{results: [ScoredDoc]}"),
      route("POST", "/retrieval/expand", "{doc_id | doc, alpha?, k?, reranker?: identity|overlap}",
            "{queries, docs}"),
      route("POST", "/synthesize",
            "{case_text, article_ids? | articles?, max_repair_rounds?, persist?, expected_version?}",
            "{bundle, attempts, case_id?, version?}"),
  });
  json doc = {{"type", "object"},
              {"required", {"doc_id", "text"}},
              {"properties",
               {{"doc_id", {{"type", "string"}}},
                {"text", {{"type", "string"}}},
                {"law", {{"type", "string"}}},
                {"article", {{"type", "string"}}},
                {"title", {{"type", "string"}}}}}};
  json errors = {{"400", "schema violation or inapplicable modification"},
                 {"404", "unknown case, session or document"},
                 {"409", "version conflict"},
                 {"422", "bundle validation failure, unmet precondition, or exhausted synthesis"},
                 {"502", "solver crashed or spoke malformed SMT-LIB"},
                 {"504", "solver timeout; body carries lower_bound when known"}};
  return {{"routes", routes},
          {"bundle", bundle_schema()},
          {"modify_request", modify},
          {"doc", doc},
          {"errors", errors}};
}

}  // namespace

struct Service::Impl {
  explicit Impl(ServiceConfig c) : cfg(std::move(c)), store(cfg.store_root), solver(cfg.solver) {
    if (cfg.llm == "live")
      llm = std::make_unique<HttpCompletionPort>(cfg.llm_http);
    else
      llm = std::make_unique<MockCompletionPort>();
    embedder = std::make_shared<HashingEmbedder>();
    index = std::make_shared<const Index>(Index::build(cfg.corpus ? load_corpus(cfg.corpus->string()) : std::vector<Doc>{},
                                                       embedder));
    routes();
  }

  ServiceConfig cfg;
  CaseStore store;
  Solver solver;
  std::unique_ptr<CompletionPort> llm;
  std::shared_ptr<const EmbedderPort> embedder;
  std::shared_ptr<const Index> index;
  std::shared_mutex index_mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::mutex sessions_mu;
  httplib::Server svr;

  Solver solver_for(const json& body) const {
    SolverConfig c = cfg.solver;
    c.timeout_ms = optional_field<long>(body, "timeout_ms", c.timeout_ms);
    if (c.timeout_ms <= 0) throw HttpError(400, "bad_request", "timeout_ms must be positive");
    return Solver(c, solver.capabilities());
  }

  std::shared_ptr<const Index> current_index() {
    std::shared_lock lock(index_mu);
    return index;
  }

  std::shared_ptr<Session> session(const std::string& sid) {
    std::lock_guard lock(sessions_mu);
    auto it = sessions.find(sid);
    if (it == sessions.end()) throw NotFound("session not found: " + sid);
    return it->second;
  }

  static json session_json(const Session& s) {
    return {{"session_id", s.id},        {"case_id", s.case_id},  {"base_version", s.base_version},
            {"version", s.version},      {"bundle", bundle_to_json(s.working)},
            {"applied", s.applied},      {"results", s.results}};
  }

  /// Runs one engine operation on `b`. `kind` names the store result kind.
  json run(const std::string& op, const ConstraintBundle& b, const json& body, std::string& kind) {
    const Solver s = solver_for(body);
    if (op == "consistency") {
      kind = "consistency";
      return to_json(check_law_consistency(b, s));
    }
    if (op == "illegality" || op == "check") {
      kind = "illegality";
      return to_json(check_case_illegality(b, s));
    }
    if (op == "illegal-terms") {
      kind = "illegal_terms";
      return to_json(enumerate_illegal_terms(b, s));
    }
    if (op == "optimize") {
      kind = "correction";
      auto strategy = parse_strategy(optional_field<std::string>(body, "strategy", "linear"));
      if (!strategy) throw HttpError(400, "bad_request", "strategy must be linear or core");
      WeightOverride wo;
      if (body.contains("weight_override")) {
        if (!body["weight_override"].is_object()) throw HttpError(400, "bad_request", "weight_override must be an object");
        for (auto it = body["weight_override"].begin(); it != body["weight_override"].end(); ++it) {
          if (!it.value().is_number_integer() || it.value().get<long>() < 1)
            throw HttpError(400, "bad_request", "weight_override factors must be positive integers");
          wo[it.key()] = it.value().get<long>();
        }
      }
      CorrectionResult r = minimize_violation(b, s, *strategy, wo);
      TracePhraser phraser;
      if (optional_field<bool>(body, "phrase", false))
        phraser = [this](const std::string& line) { return phrase_trace_line(line, *llm); };
      return to_json(r, render_trace(r, b, phraser));
    }
    throw NotFound("unknown operation '" + op + "'");
  }

  void routes();
};

void Service::Impl::routes() {
  auto handle = [this](auto fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      json out;
      int status = 200;
      try {
        out = fn(req, res, status);
      } catch (const HttpError& e) {
        status = e.status;
        out = {{"error", e.code}, {"message", e.what()}};
        if (!e.details.is_null()) out["details"] = e.details;
      } catch (const InvalidBundle& e) {
        status = 422;
        out = {{"error", "invalid_bundle"}, {"message", e.what()}, {"details", e.details()}};
      } catch (const ModifyError& e) {
        status = 400;
        out = {{"error", "bad_modification"}, {"message", e.what()}};
      } catch (const FormatError& e) {
        status = 400;
        out = {{"error", "schema_violation"}, {"message", e.what()}};
      } catch (const json::exception& e) {
        status = 400;
        out = {{"error", "schema_violation"}, {"message", e.what()}};
      } catch (const NotFound& e) {
        status = 404;
        out = {{"error", "not_found"}, {"message", e.what()}};
      } catch (const VersionConflict& e) {
        status = 409;
        out = {{"error", "version_conflict"}, {"message", e.what()}, {"expected", e.expected()}, {"actual", e.actual()}};
      } catch (const SolverTimeout& e) {
        status = 504;
        out = {{"error", "solver_timeout"}, {"message", e.what()}, {"timeout_ms", e.timeout_ms()}};
        out["lower_bound"] = e.lower_bound() >= 0 ? json(e.lower_bound()) : json(nullptr);
      } catch (const SynthesisExhausted& e) {
        status = 422;
        json attempts = json::array();
        for (const auto& a : e.attempts()) attempts.push_back(to_json(a));
        out = {{"error", "synthesis_exhausted"}, {"message", e.what()}, {"attempts", attempts}};
      } catch (const PreconditionViolation& e) {
        status = 422;
        out = {{"error", "precondition"}, {"message", e.what()}};
      } catch (const NoFeasibleCompliance& e) {
        status = 422;
        out = {{"error", "no_feasible_compliance"}, {"message", e.what()}};
      } catch (const CoresUnsupported& e) {
        status = 422;
        out = {{"error", "cores_unsupported"}, {"message", e.what()}};
      } catch (const SolverCrash& e) {
        status = 502;
        out = {{"error", "solver_crash"}, {"message", e.what()}};
      } catch (const ProtocolError& e) {
        status = 502;
        out = {{"error", "solver_protocol"}, {"message", e.what()}};
      } catch (const EmptyGeneration& e) {
        status = 422;
        out = {{"error", "empty_generation"}, {"message", e.what()}};
      } catch (const LlmError& e) {
        status = 502;
        out = {{"error", "llm_unavailable"}, {"message", e.what()}};
      } catch (const PortFailure& e) {
        status = 502;
        out = {{"error", "port_failure"}, {"message", e.what()}, {"query", e.query()}};
      } catch (const std::exception& e) {
        status = 500;
        out = {{"error", "internal"}, {"message", e.what()}};
      }
      res.status = status;
      if (status != 204) res.set_content(out.dump(), "application/json");
    };
  };

  svr.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const std::string origin = req.get_header_value("Origin");
    if (cfg.cors_allowlist.empty()) {
      res.set_header("Access-Control-Allow-Origin", "*");
    } else if (std::find(cfg.cors_allowlist.begin(), cfg.cors_allowlist.end(), origin) != cfg.cors_allowlist.end()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  svr.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  svr.Get("/schema", handle([](const httplib::Request&, httplib::Response&, int&) { return service_schema(); }));
  svr.Get("/health", handle([this](const httplib::Request&, httplib::Response&, int&) {
    json j = {{"status", "ok"}, {"solver", cfg.solver.executable}};
    if (solver.capabilities()) j["solver_version"] = solver.capabilities()->version;
    return j;
  }));

  svr.Post("/cases", handle([this](const httplib::Request& req, httplib::Response&, int& status) {
    json body = parse_body(req);
    long expected = 0;
    json doc = body;
    if (body.contains("bundle")) {
      doc = body["bundle"];
      expected = optional_field<long>(body, "expected_version", 0);
    }
    ConstraintBundle b = bundle_from_json(doc);
    if (auto errs = validate_bundle(b); !errs.empty())
      throw HttpError(422, "invalid_bundle", "bundle '" + b.case_id + "' failed validation", validation_details(errs));
    CaseRecord r = store.put_case(b, expected, "api");
    status = expected == 0 ? 201 : 200;
    return json{{"case_id", r.case_id}, {"version", r.version}};
  }));

  svr.Get("/cases", handle([this](const httplib::Request& req, httplib::Response&, int&) {
    CaseFilter f;
    f.id_prefix = req.get_param_value("prefix");
    json out = json::array();
    for (const auto& r : store.list_cases(f)) {
      json kinds = json::array();
      for (const auto& [k, _] : r.latest) kinds.push_back(k);
      out.push_back({{"case_id", r.case_id}, {"version", r.version},
                     {"constraints", r.bundle.constraints.size()}, {"latest_kinds", kinds}});
    }
    return json{{"cases", out}};
  }));

  svr.Get(R"(/cases/([^/]+))", handle([this](const httplib::Request& req, httplib::Response&, int&) {
    CaseRecord r = store.get_case(req.matches[1]);
    json history = json::array();
    for (const auto& e : r.history) history.push_back(to_json(e));
    return json{{"case_id", r.case_id}, {"version", r.version}, {"bundle", bundle_to_json(r.bundle)},
                {"history", history}, {"latest", r.latest}};
  }));

  auto case_run = [this, handle](const std::string& pattern, const std::string& op) {
    svr.Post(pattern, handle([this, op](const httplib::Request& req, httplib::Response&, int&) {
      json body = parse_body(req);
      CaseRecord r = store.get_case(req.matches[1]);
      std::string kind;
      json result = run(op, r.bundle, body, kind);
      const long version = store.record_result(r.case_id, kind, result, "api");
      result["case_id"] = r.case_id;
      result["version"] = version;
      return result;
    }));
  };
  case_run(R"(/cases/([^/]+)/check/consistency)", "consistency");
  case_run(R"(/cases/([^/]+)/check/illegality)", "illegality");
  case_run(R"(/cases/([^/]+)/illegal-terms)", "illegal-terms");
  case_run(R"(/cases/([^/]+)/optimize)", "optimize");

  svr.Post("/sessions", handle([this](const httplib::Request& req, httplib::Response&, int& status) {
    json body = parse_body(req);
    if (!body.contains("case_id") || !body["case_id"].is_string())
      throw HttpError(400, "bad_request", "session needs a string 'case_id'");
    CaseRecord r = store.get_case(body["case_id"].get<std::string>());
    auto s = std::make_shared<Session>();
    s->id = random_token();
    s->case_id = r.case_id;
    s->base_version = r.version;
    s->working = r.bundle;
    {
      std::lock_guard lock(sessions_mu);
      sessions[s->id] = s;
    }
    status = 201;
    return session_json(*s);
  }));

  svr.Get(R"(/sessions/([^/]+))", handle([this](const httplib::Request& req, httplib::Response&, int&) {
    auto s = session(req.matches[1]);
    std::lock_guard lock(s->mu);
    return session_json(*s);
  }));

  svr.Post(R"(/sessions/([^/]+)/modify)", handle([this](const httplib::Request& req, httplib::Response&, int&) {
    auto s = session(req.matches[1]);
    ModifyRequest m = modify_request_from_json(parse_body(req));
    std::lock_guard lock(s->mu);
    if (*m.expected_version != s->version) throw VersionConflict(*m.expected_version, s->version);
    s->working = apply_modify(s->working, m);
    ++s->version;
    s->applied.push_back({{"version", s->version}, {"request", to_json(m)}});
    return session_json(*s);
  }));

  svr.Post(R"(/sessions/([^/]+)/run/([a-z-]+))", handle([this](const httplib::Request& req, httplib::Response&, int&) {
    auto s = session(req.matches[1]);
    json body = parse_body(req);
    ConstraintBundle working;
    long version;
    {
      std::lock_guard lock(s->mu);
      working = s->working;
      version = s->version;
    }
    std::string kind;
    json result = run(req.matches[2], working, body, kind);
    {
      std::lock_guard lock(s->mu);
      s->results.push_back({{"version", version}, {"kind", kind}, {"result", result}});
    }
    result["session_id"] = s->id;
    result["session_version"] = version;
    return result;
  }));

  svr.Post(R"(/sessions/([^/]+)/commit)", handle([this](const httplib::Request& req, httplib::Response&, int&) {
    auto s = session(req.matches[1]);
    std::lock_guard lock(s->mu);
    CaseRecord r = store.put_case(s->working, s->base_version, "session:" + s->id);
    s->base_version = r.version;
    return json{{"case_id", r.case_id}, {"version", r.version}, {"session_id", s->id}};
  }));

  svr.Delete(R"(/sessions/([^/]+))", handle([this](const httplib::Request& req, httplib::Response&, int& status) {
    std::lock_guard lock(sessions_mu);
    if (sessions.erase(req.matches[1]) == 0) throw NotFound("session not found: " + std::string(req.matches[1]));
    status = 204;
    return json();
  }));

  svr.Post("/retrieval/corpus", handle([this](const httplib::Request& req, httplib::Response&, int&) {
    json body = parse_body(req);
    if (!body.contains("docs") || !body["docs"].is_array()) throw HttpError(400, "bad_request", "needs 'docs' array");
    std::vector<Doc> docs;
    for (const auto& d : body["docs"]) docs.push_back(doc_from_json(d));
    auto fresh = std::make_shared<const Index>(Index::build(std::move(docs), embedder));
    std::unique_lock lock(index_mu);
    index = fresh;
    return json{{"size", index->size()}};
  }));

  svr.Post("/retrieval/search", handle([this](const httplib::Request& req, httplib::Response&, int&) {
    json body = parse_body(req);
    if (!body.contains("query") || !body["query"].is_string()) throw HttpError(400, "bad_request", "needs 'query'");
    const std::string q = body["query"];
    const double alpha = optional_field<double>(body, "alpha", 0.8);
    const long k = optional_field<long>(body, "k", 10);
    const std::string mode = optional_field<std::string>(body, "mode", "hybrid");
    if (k < 1) throw HttpError(400, "bad_request", "k must be at least 1");
    if (alpha < 0.0 || alpha > 1.0) throw HttpError(400, "bad_request", "alpha must lie in [0, 1]");
    auto ix = current_index();
    std::vector<ScoredDoc> hits;
    if (mode == "hybrid") hits = hybrid_search(*ix, q, static_cast<std::size_t>(k), alpha);
    else if (mode == "bm25") hits = bm25_search(*ix, q, static_cast<std::size_t>(k));
    else if (mode == "vector") hits = vector_search(*ix, q, static_cast<std::size_t>(k));
    else throw HttpError(400, "bad_request", "mode must be hybrid, bm25 or vector");
    json out = json::array();
    for (const auto& h : hits) {
      json j = to_json(h);
      j["doc"] = to_json(*ix->find(h.doc_id));
      out.push_back(j);
    }
    return json{{"results", out}, {"alpha", alpha}, {"mode", mode}};
  }));

  svr.Post("/retrieval/expand", handle([this](const httplib::Request& req, httplib::Response&, int&) {
    json body = parse_body(req);
    auto ix = current_index();
    Doc base;
    if (body.contains("doc")) {
      base = doc_from_json(body["doc"]);
    } else if (body.contains("doc_id") && body["doc_id"].is_string()) {
      const Doc* d = ix->find(body["doc_id"].get<std::string>());
      if (!d) throw NotFound("unknown doc_id: " + body["doc_id"].get<std::string>());
      base = *d;
    } else {
      throw HttpError(400, "bad_request", "needs 'doc_id' or 'doc'");
    }
    const std::string rr = optional_field<std::string>(body, "reranker", "identity");
    IdentityReranker identity;
    OverlapReranker overlap;
    if (rr != "identity" && rr != "overlap") throw HttpError(400, "bad_request", "reranker must be identity or overlap");
    auto queries = gen_queries(base, *llm);
    struct Fixed final : QueryGenPort {
      std::vector<std::string> q;
      std::vector<std::string> gen_queries(const Doc&) const override { return q; }
    } fixed;
    fixed.q = queries;
    LlmFilter filter(*llm);
    ExpansionPorts ports{&fixed, rr == "overlap" ? static_cast<const RerankerPort*>(&overlap) : &identity, &filter};
    auto docs = expand_article(base, *ix, ports, optional_field<double>(body, "alpha", 0.8),
                               static_cast<std::size_t>(optional_field<long>(body, "k", 10)));
    json out = json::array();
    for (const auto& d : docs) out.push_back(to_json(d));
    return json{{"base", base.doc_id}, {"queries", queries}, {"docs", out}};
  }));

  svr.Post("/synthesize", handle([this](const httplib::Request& req, httplib::Response&, int& status) {
    json body = parse_body(req);
    if (!body.contains("case_text") || !body["case_text"].is_string())
      throw HttpError(400, "bad_request", "needs 'case_text'");
    ArticleMap articles;
    if (body.contains("articles")) {
      articles = ArticleMap::from_json(nlohmann::ordered_json::parse(body["articles"].dump()));
    } else {
      auto ix = current_index();
      for (const auto& id : optional_field<std::vector<std::string>>(body, "article_ids", {})) {
        const Doc* d = ix->find(id);
        if (!d) throw NotFound("unknown article id: " + id);
        ArticleParts p = split_article(*d);
        const std::string key = d->article.empty() ? d->doc_id : d->article;
        if (!articles.articles.count(key)) articles.order.push_back(key);
        articles.articles[key] = Article{p.title, p.clauses, p.content};
      }
    }
    SynthesisOptions opts;
    opts.max_repair_rounds = static_cast<int>(optional_field<long>(body, "max_repair_rounds", 3));
    SynthesisResult r = synthesize_bundle(body["case_text"].get<std::string>(), articles, *llm, solver_for(body), opts);
    json attempts = json::array();
    for (const auto& a : r.attempts) attempts.push_back(to_json(a));
    json out = {{"bundle", bundle_to_json(r.bundle)}, {"attempts", attempts}};
    if (optional_field<bool>(body, "persist", false)) {
      CaseRecord c = store.put_case(r.bundle, optional_field<long>(body, "expected_version", 0), "synthesize");
      out["case_id"] = c.case_id;
      out["version"] = c.version;
      status = 201;
    }
    return out;
  }));

  if (cfg.static_dir) svr.set_mount_point("/", cfg.static_dir->string());
}

Service::Service(ServiceConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->svr.bind_to_any_port(host) : (impl_->svr.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void Service::run() { impl_->svr.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->svr.stop();
}

std::pair<std::string, int> resolve_bind(const std::optional<std::string>& cli) {
  std::string addr = cli.value_or("");
  if (addr.empty())
    if (const char* env = std::getenv("LEXV_BIND"); env && *env) addr = env;
  if (addr.empty()) addr = "127.0.0.1:8080";
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) return {addr, 8080};
  try {
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error("bad bind address '" + addr + "'");
  }
}

}  // namespace lexv
