#include <doctest.h>

#include "lexv/errors.hpp"
#include "lexv/generator.hpp"
#include "lexv/retrieval.hpp"
#include "lexv/tokenizer.hpp"

#include <cmath>

using namespace lexv;

namespace {

std::shared_ptr<const EmbedderPort> hashing() { return std::make_shared<HashingEmbedder>(); }

std::vector<std::string> ids(const std::vector<ScoredDoc>& v) {
  std::vector<std::string> out;
  for (const auto& d : v) out.push_back(d.doc_id);
  return out;
}

std::vector<Doc> small_corpus() {
  return {{"d1", "capital ratio capital", "ins", "1", ""},
          {"d2", "capital plan", "ins", "2", ""},
          {"d3", "receiver appointed now today", "ins", "3", ""}};
}

// Reports one dimension and produces another.
class MisreportingEmbedder final : public EmbedderPort {
 public:
  explicit MisreportingEmbedder(std::size_t dim) : dim_(dim) {}
  std::vector<double> embed(std::string_view) const override { return std::vector<double>(dim_, 0.0); }
  std::size_t dimension() const override { return 3; }

 private:
  std::size_t dim_;
};

}  // namespace

TEST_CASE("tokenizer") {
  CHECK(tokenize("Capital-Ratio, 200 percent!") == std::vector<std::string>{"capital", "ratio", "200", "percent"});
  CHECK(tokenize("ÄRZTE Ωmega ＡＢＣ") == std::vector<std::string>{"ärzte", "ωmega", "abc"});
  CHECK(tokenize("保險業") == std::vector<std::string>{"保", "險", "業"});
  CHECK(tokenize("保險業 plan", TokenizerMode::Bigrams) == std::vector<std::string>{"保險", "險業", "plan"});
  CHECK(tokenize("保", TokenizerMode::Bigrams) == std::vector<std::string>{"保"});
  CHECK(decode_utf8("\xff" "a") == std::vector<char32_t>{0xFFFD, U'a'});
}

TEST_CASE("BM25 matches the hand computation") {
  auto idx = Index::build(small_corpus(), hashing());
  // N = 3, n(capital) = 2, avgdl = 3
  const double idf = std::log((3 - 2 + 0.5) / (2 + 0.5) + 1.0);
  const double d1 = idf * 2 * 2.2 / (2 + 1.2 * (0.25 + 0.75 * 3.0 / 3.0));
  const double d2 = idf * 1 * 2.2 / (1 + 1.2 * (0.25 + 0.75 * 2.0 / 3.0));
  auto hits = bm25_search(idx, "capital", 10);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].doc_id == "d1");
  CHECK(std::abs(hits[0].bm25 - d1) < 1e-12);
  CHECK(std::abs(hits[1].bm25 - d2) < 1e-12);
  // Repeated query terms count once.
  CHECK(std::abs(bm25_search(idx, "capital capital", 10)[0].bm25 - d1) < 1e-12);
  CHECK(bm25_search(idx, "nothing", 10).empty());
  CHECK(idx.postings_targets() == 3);
}

TEST_CASE("hashing embedder") {
  HashingEmbedder e;
  auto v = e.embed("capital adequacy ratio");
  REQUIRE(v.size() == 64);
  double norm = 0;
  for (double x : v) norm += x * x;
  CHECK(std::abs(norm - 1.0) < 1e-12);
  CHECK(e.embed("capital adequacy ratio") == v);
  auto zero = e.embed("!!!");
  for (double x : zero) CHECK(x == 0.0);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("index build errors") {
  auto docs = small_corpus();
  docs.push_back(docs[0]);
  CHECK_THROWS_AS(Index::build(docs, hashing()), DuplicateDoc);
  CHECK_THROWS_AS(Index::build(small_corpus(), std::make_shared<MisreportingEmbedder>(5)), DimensionMismatch);
}

TEST_CASE("hybrid score") {
  CHECK(std::abs(hybrid_score(0.8, 0.9, 0.5) - 0.82) < 1e-12);
  CHECK(hybrid_score(1.0, 0.3, 0.9) == 0.3);
  CHECK(hybrid_score(0.0, 0.3, 0.9) == 0.9);
  auto idx = Index::build(small_corpus(), hashing());
  CHECK_THROWS(hybrid_search(idx, "capital", 3, 1.5));
  CHECK_THROWS(hybrid_search(idx, "capital", 3, -0.1));
}

TEST_CASE("alpha extremes reproduce the pure rankings") {
  const std::vector<std::string> vocab = {"capital", "ratio",  "plan",   "insurer", "asset",   "receiver",
                                          "level",   "measure", "order", "restrict", "penalty", "report",
                                          "net",     "worth",  "risk",   "own",     "submit",  "execute"};
  Rng rng(99);
  auto pick = [&] { return vocab[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(vocab.size()) - 1))]; };
  for (int corpus = 0; corpus < 40; ++corpus) {
    std::vector<Doc> docs;
    const long n = rng.uniform_int(3, 25);
    for (long i = 0; i < n; ++i) {
      std::string text;
      for (long w = rng.uniform_int(1, 12); w > 0; --w) text += pick() + " ";
      docs.push_back({"doc" + std::to_string(i), text, "", "", ""});
    }
    auto idx = Index::build(docs, hashing());
    for (int qn = 0; qn < 5; ++qn) {
      std::string q = pick();
      if (rng.chance(0.5)) q += " " + pick();
      const std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, 8));
      CAPTURE(corpus);
      CAPTURE(q);
      CHECK(ids(hybrid_search(idx, q, k, 1.0)) == ids(vector_search(idx, q, k)));
      auto lexical = ids(bm25_search(idx, q, k));
      auto blended = ids(hybrid_search(idx, q, k, 0.0));
      blended.resize(std::min(blended.size(), lexical.size()));
      CHECK(blended == lexical);
    }
  }
}

TEST_CASE("corpus JSON lines") {
  auto docs = parse_corpus("{\"doc_id\":\"a\",\"text\":\"x\"}\n\n{\"doc_id\":\"b\",\"text\":\"y\",\"law\":\"L\"}\n");
  REQUIRE(docs.size() == 2);
  CHECK(docs[1].law == "L");
  CHECK(doc_from_json(to_json(docs[1])) == docs[1]);
  CHECK_THROWS(parse_corpus("{not json}\n"));
}

namespace {

struct ListQueries final : QueryGenPort {
  std::vector<std::string> qs;
  std::vector<std::string> gen_queries(const Doc&) const override { return qs; }
};

struct DropOne final : RerankerPort {
  std::vector<ScoredDoc> rerank(std::string_view, std::vector<ScoredDoc> docs, const Index&) const override {
    if (!docs.empty()) docs.pop_back();
    return docs;
  }
};

struct Throwing final : FilterPort {
  std::vector<std::string> filter_useful(const std::vector<Doc>&, const Doc&) const override {
    throw std::runtime_error("filter offline");
  }
};

struct InventsIds final : FilterPort {
  std::vector<std::string> filter_useful(const std::vector<Doc>& docs, const Doc&) const override {
    std::vector<std::string> out{"ghost"};
    for (const auto& d : docs) out.push_back(d.doc_id);
    return out;
  }
};

}  // namespace

TEST_CASE("expansion contracts") {
  auto idx = Index::build(small_corpus(), hashing());
  ListQueries qg;
  qg.qs = {"capital", "capital plan", "receiver"};
  IdentityReranker id;
  AcceptAllFilter all;

  auto out = expand_article(small_corpus()[0], idx, {&qg, &id, &all}, 0.8, 2);
  std::set<std::string> unique;
  for (const auto& d : out) CHECK(unique.insert(d.doc_id).second);
  CHECK(unique.count("d3"));

  InventsIds invents;
  for (const auto& d : expand_article(small_corpus()[0], idx, {&qg, &id, &invents}, 0.8, 2))
    CHECK(d.doc_id != "ghost");

  DropOne drop;
  try {
    expand_article(small_corpus()[0], idx, {&qg, &drop, &all});
    FAIL("expected PortFailure");
  } catch (const PortFailure& e) {
    CHECK(e.query() == "capital");
  }
  Throwing throwing;
  CHECK_THROWS_AS(expand_article(small_corpus()[0], idx, {&qg, &id, &throwing}), PortFailure);
  CHECK_THROWS(expand_article(small_corpus()[0], idx, {&qg, nullptr, &all}));
}

TEST_CASE("overlap reranker orders by shared terms") {
  auto idx = Index::build(small_corpus(), hashing());
  OverlapReranker r;
  auto hits = hybrid_search(idx, "capital plan", 3, 0.5);
  auto ranked = r.rerank("capital plan", hits, idx);
  REQUIRE(ranked.size() == hits.size());
  CHECK(ranked[0].doc_id == "d2");
  CHECK(*ranked[0].rerank == 1.0);
}
