// lexverify: command-line front end over the lexv library.
//
// Exit codes: 0 success (or the expected verdict), 1 usage or validation
// error, 2 verdict contrary to expectation, 3 solver failure or timeout.

#include "lexv/case_store.hpp"
#include "lexv/generator.hpp"
#include "lexv/json.hpp"
#include "lexv/legal_parser.hpp"
#include "lexv/llm.hpp"
#include "lexv/report.hpp"
#include "lexv/retrieval.hpp"
#include "lexv/service.hpp"
#include "lexv/verification.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace lexv;

enum Exit { kOk = 0, kUsage = 1, kContrary = 2, kSolver = 3 };

struct Globals {
  std::optional<std::string> solver;
  long timeout_ms = 10000;
  bool pretty = false;
  std::string llm = "mock";
  std::string llm_endpoint;
  std::string llm_model = "default";
};

void emit(const json& j, const Globals& g) { std::cout << (g.pretty ? j.dump(2) : j.dump()) << "\n"; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Solver make_solver(const Globals& g) {
  SolverConfig cfg = resolve_solver_config(g.solver);
  cfg.timeout_ms = g.timeout_ms;
  return Solver(cfg);
}

ConstraintBundle load_valid(const std::string& path) {
  ConstraintBundle b = load_bundle(path);
  require_valid(b);
  return b;
}

std::unique_ptr<CompletionPort> make_port(const Globals& g) {
  if (g.llm == "mock") return std::make_unique<MockCompletionPort>();
  if (g.llm != "live") throw Error("--llm must be mock or live");
  if (g.llm_endpoint.empty()) throw Error("--llm live needs --llm-endpoint");
  return std::make_unique<HttpCompletionPort>(HttpPortConfig{g.llm_endpoint, g.llm_model});
}

WeightOverride parse_overrides(const std::vector<std::string>& items) {
  WeightOverride out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error("--weight-override expects key=factor, got '" + item + "'");
    long f = 0;
    try {
      f = std::stol(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error("--weight-override factor must be an integer: '" + item + "'");
    }
    if (f < 1) throw Error("--weight-override factor must be positive: '" + item + "'");
    out[item.substr(0, eq)] = f;
  }
  return out;
}

Service* g_service = nullptr;
void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexverify: SMT-based compliance verification"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--solver", g.solver, "SMT-LIB 2 solver executable (default: $LEXV_SOLVER, then z3)");
  app.add_option("--timeout-ms", g.timeout_ms, "per-call solver timeout")->check(CLI::PositiveNumber);
  app.add_flag("--pretty", g.pretty, "indent JSON output");
  app.add_option("--llm", g.llm, "completion port: mock or live")->check(CLI::IsMember({"mock", "live"}));
  app.add_option("--llm-endpoint", g.llm_endpoint, "chat-completion URL for --llm live");
  app.add_option("--llm-model", g.llm_model, "model name sent to the live endpoint");

  std::string bundle_path;
  std::function<int()> action;

  auto* validate = app.add_subcommand("validate", "check a bundle against the structural invariants");
  validate->add_option("bundle", bundle_path)->required();
  validate->callback([&] {
    action = [&] {
      ConstraintBundle b;
      try {
        b = load_bundle(bundle_path);
      } catch (const FormatError& e) {
        emit({{"valid", false}, {"errors", {{{"code", "Format"}, {"subject", bundle_path}, {"message", e.what()}}}}}, g);
        return kUsage;
      }
      json errs = json::array();
      for (const auto& e : validate_bundle(b))
        errs.push_back({{"code", code_name(e.code)}, {"subject", e.subject}, {"message", e.message}});
      emit({{"valid", errs.empty()}, {"case_id", b.case_id}, {"errors", errs}}, g);
      for (const auto& e : errs) std::cerr << e["code"].get<std::string>() << " " << e["subject"].get<std::string>()
                                           << ": " << e["message"].get<std::string>() << "\n";
      return errs.empty() ? kOk : kUsage;
    };
  });

  auto* check_law = app.add_subcommand("check-law", "satisfiability of the HARD constraints alone");
  check_law->add_option("bundle", bundle_path)->required();
  check_law->callback([&] {
    action = [&] {
      Verdict v = check_law_consistency(load_valid(bundle_path), make_solver(g));
      emit(to_json(v), g);
      return v.status == Status::Sat ? kOk : kContrary;
    };
  });

  bool no_minimize = false;
  auto* check_case = app.add_subcommand("check-case", "law + facts + penalty=false; UNSAT proves the violation");
  check_case->add_option("bundle", bundle_path)->required();
  check_case->add_flag("--no-minimize", no_minimize, "report the solver's core without shrinking it");
  check_case->callback([&] {
    action = [&] {
      Verdict v = check_case_illegality(load_valid(bundle_path), make_solver(g), !no_minimize);
      emit(to_json(v), g);
      if (v.status == Status::Sat) std::cerr << "case is consistent with penalty = false; no violation proven\n";
      return v.status == Status::Unsat ? kOk : kContrary;
    };
  });

  auto* terms = app.add_subcommand("illegal-terms", "enumerate every statutory term involved in a violation");
  terms->add_option("bundle", bundle_path)->required();
  terms->callback([&] {
    action = [&] {
      try {
        emit(to_json(enumerate_illegal_terms(load_valid(bundle_path), make_solver(g))), g);
        return kOk;
      } catch (const PreconditionViolation& e) {
        std::cerr << e.what() << "\n";
        return kContrary;
      }
    };
  });

  std::string strategy = "linear";
  std::vector<std::string> overrides;
  bool phrase = false;
  auto* optimize = app.add_subcommand("optimize", "minimal-weight factual revision restoring legality");
  optimize->add_option("bundle", bundle_path)->required();
  optimize->add_option("--strategy", strategy)->check(CLI::IsMember({"linear", "core"}));
  optimize->add_option("--weight-override", overrides, "key=factor, key being a constraint id or group");
  optimize->add_flag("--phrase", phrase, "rephrase trace lines through the completion port");
  optimize->callback([&] {
    action = [&] {
      ConstraintBundle b = load_valid(bundle_path);
      try {
        CorrectionResult r = minimize_violation(b, make_solver(g), *parse_strategy(strategy), parse_overrides(overrides));
        std::unique_ptr<CompletionPort> port;
        TracePhraser phraser;
        if (phrase) {
          port = make_port(g);
          phraser = [&](const std::string& line) { return phrase_trace_line(line, *port); };
        }
        auto trace = render_trace(r, b, phraser);
        emit(to_json(r, trace), g);
        for (const auto& line : trace) std::cerr << line << "\n";
        return kOk;
      } catch (const NoFeasibleCompliance& e) {
        std::cerr << e.what() << "\n";
        return kContrary;
      }
    };
  });

  std::string text_path, lang = "en", patterns_path;
  auto* extract = app.add_subcommand("extract-articles", "split legal text into articles and clauses");
  extract->add_option("file", text_path)->required();
  extract->add_option("--lang", lang)->check(CLI::IsMember({"en", "zh"}));
  extract->add_option("--patterns", patterns_path, "JSON overrides: article, clause, headings, joiner");
  extract->callback([&] {
    action = [&] {
      PatternSet p = default_patterns(lang);
      if (!patterns_path.empty()) p = patterns_from_json(read_json_file(patterns_path), p);
      ArticleMap m = extract_articles(read_text(text_path), p);
      std::cout << (g.pretty ? m.to_json().dump(2) : m.to_json().dump()) << "\n";
      std::cerr << m.size() << " articles; " << m.discarded_lines << " lines before the first article discarded; "
                << m.heading_lines << " heading lines skipped\n";
      return kOk;
    };
  });

  std::string query, corpus, mode = "hybrid", reranker = "identity";
  double alpha = 0.8;
  std::size_t k = 10;
  bool bigrams = false;
  auto* search = app.add_subcommand("search", "hybrid BM25 + vector search over a JSON Lines corpus");
  search->add_option("query", query)->required();
  search->add_option("--corpus", corpus)->required();
  search->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
  search->add_option("-k", k)->check(CLI::PositiveNumber);
  search->add_option("--mode", mode)->check(CLI::IsMember({"hybrid", "bm25", "vector"}));
  search->add_flag("--bigrams", bigrams, "CJK character-bigram tokenization");
  search->callback([&] {
    action = [&] {
      const TokenizerMode tm = bigrams ? TokenizerMode::Bigrams : TokenizerMode::Words;
      Index ix = Index::build(load_corpus(corpus), std::make_shared<HashingEmbedder>(64, tm), tm);
      auto hits = mode == "bm25"     ? bm25_search(ix, query, k)
                  : mode == "vector" ? vector_search(ix, query, k)
                                     : hybrid_search(ix, query, k, alpha);
      json out = json::array();
      for (const auto& h : hits) {
        json j = to_json(h);
        j["law"] = ix.find(h.doc_id)->law;
        j["article"] = ix.find(h.doc_id)->article;
        out.push_back(j);
      }
      emit(out, g);
      return kOk;
    };
  });

  std::string article_id;
  auto* expand = app.add_subcommand("expand", "supplementary articles for a base article");
  expand->add_option("article-id", article_id, "doc_id of the base article")->required();
  expand->add_option("--corpus", corpus)->required();
  expand->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
  expand->add_option("-k", k)->check(CLI::PositiveNumber);
  expand->add_option("--reranker", reranker)->check(CLI::IsMember({"identity", "overlap"}));
  expand->callback([&] {
    action = [&] {
      Index ix = Index::build(load_corpus(corpus), std::make_shared<HashingEmbedder>());
      const Doc* base = ix.find(article_id);
      if (!base) throw NotFound("no doc '" + article_id + "' in " + corpus);
      auto port = make_port(g);
      LlmQueryGen gen(*port);
      LlmFilter filter(*port);
      IdentityReranker identity;
      OverlapReranker overlap;
      ExpansionPorts ports{&gen, reranker == "overlap" ? static_cast<const RerankerPort*>(&overlap) : &identity, &filter};
      json out = json::array();
      for (const auto& d : expand_article(*base, ix, ports, alpha, k)) out.push_back(to_json(d));
      emit(out, g);
      return kOk;
    };
  });

  std::string case_path, articles_path, store_dir;
  bool review = false;
  int max_rounds = 3;
  auto* synth = app.add_subcommand("synthesize", "draft a bundle from case text and articles via the completion port");
  synth->add_option("case", case_path)->required();
  synth->add_option("--articles", articles_path, "ArticleMap JSON (extract-articles output)")->required();
  synth->add_option("--max-rounds", max_rounds)->check(CLI::Range(1, 20));
  synth->add_option("--store", store_dir, "persist the accepted bundle into this store");
  synth->add_flag("--review", review, "print the bundle to stderr and ask before persisting");
  synth->callback([&] {
    action = [&] {
      auto articles = ArticleMap::from_json(nlohmann::ordered_json::parse(read_text(articles_path)));
      auto port = make_port(g);
      SynthesisOptions opts;
      opts.max_repair_rounds = max_rounds;
      try {
        SynthesisResult r = synthesize_bundle(read_text(case_path), articles, *port, make_solver(g), opts);
        json attempts = json::array();
        for (const auto& a : r.attempts) attempts.push_back(to_json(a));
        json out = {{"bundle", bundle_to_json(r.bundle)}, {"attempts", attempts}};
        bool persist = !store_dir.empty();
        if (persist && review) {
          std::cerr << bundle_to_json(r.bundle).dump(2) << "\npersist this bundle? [y/N] ";
          std::string answer;
          std::getline(std::cin, answer);
          persist = answer == "y" || answer == "Y" || answer == "yes";
        } else if (review) {
          std::cerr << bundle_to_json(r.bundle).dump(2) << "\n";
        }
        if (persist) {
          CaseStore store(store_dir);
          long expected = 0;
          try {
            expected = store.get_case(r.bundle.case_id).version;
          } catch (const NotFound&) {
          }
          out["version"] = store.put_case(r.bundle, expected, "cli:synthesize").version;
        }
        emit(out, g);
        return kOk;
      } catch (const SynthesisExhausted& e) {
        json attempts = json::array();
        for (const auto& a : e.attempts()) attempts.push_back(to_json(a));
        emit({{"error", "synthesis_exhausted"}, {"attempts", attempts}}, g);
        std::cerr << e.what() << "; last feedback: " << e.attempts().back().feedback() << "\n";
        return kContrary;
      }
    };
  });

  std::optional<std::string> bind;
  std::string static_dir;
  std::vector<std::string> cors;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--store", store_dir)->required();
  serve->add_option("--bind", bind, "host:port (default $LEXV_BIND, then 127.0.0.1:8080)");
  serve->add_option("--corpus", corpus, "JSON Lines corpus for the retrieval routes");
  serve->add_option("--static", static_dir, "directory served at /");
  serve->add_option("--cors", cors, "allowed origins (default: any)");
  serve->callback([&] {
    action = [&] {
      ServiceConfig cfg;
      cfg.store_root = store_dir;
      cfg.solver = resolve_solver_config(g.solver);
      cfg.solver.timeout_ms = g.timeout_ms;
      cfg.cors_allowlist = cors;
      if (!corpus.empty()) cfg.corpus = corpus;
      if (!static_dir.empty()) cfg.static_dir = static_dir;
      cfg.llm = g.llm;
      cfg.llm_http = {g.llm_endpoint, g.llm_model};
      Service svc(cfg);
      auto [host, port] = resolve_bind(bind);
      int bound = svc.bind(host, port);
      g_service = &svc;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << host << ":" << bound << "\n";
      svc.run();
      g_service = nullptr;
      return kOk;
    };
  });

  GenOptions gen;
  std::string out_dir;
  auto* gen_cases = app.add_subcommand("gen-cases", "synthetic bundles shaped like the benchmark statistics");
  gen_cases->add_option("--n", gen.n);
  gen_cases->add_option("--seed", gen.seed);
  gen_cases->add_option("--max-soft", gen.max_soft, "cap on SOFT constraints (0 = none)");
  gen_cases->add_option("--max-constraints", gen.max_constraints, "cap on constraints (<= 12 selects a compact profile)");
  gen_cases->add_option("--out", out_dir, "write <case_id>.json files here instead of a JSON array on stdout");
  gen_cases->callback([&] {
    action = [&] {
      auto cases = generate_cases(gen);
      if (out_dir.empty()) {
        json arr = json::array();
        for (const auto& b : cases) arr.push_back(bundle_to_json(b));
        emit(arr, g);
      } else {
        std::filesystem::create_directories(out_dir);
        for (const auto& b : cases) save_bundle(b, std::filesystem::path(out_dir) / (b.case_id + ".json"));
        emit({{"written", cases.size()}, {"dir", out_dir}}, g);
      }
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const InvalidBundle& e) {
    std::cerr << e.what() << "\n";
    for (const auto& d : e.details()) std::cerr << "  " << d << "\n";
    return kUsage;
  } catch (const SolverTimeout& e) {
    std::cerr << e.what();
    if (e.lower_bound() >= 0) std::cerr << " (certified lower bound " << e.lower_bound() << ")";
    std::cerr << "\n";
    return kSolver;
  } catch (const SolverCrash& e) {
    std::cerr << e.what() << "\n";
    return kSolver;
  } catch (const ProtocolError& e) {
    std::cerr << e.what() << "\n";
    return kSolver;
  } catch (const CoresUnsupported& e) {
    std::cerr << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
}
