#pragma once

#include "lexv/tokenizer.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexv {

struct Doc {
  std::string doc_id;
  std::string text;
  std::string law;
  std::string article;
  std::string title;

  friend bool operator==(const Doc&, const Doc&) = default;
};

struct ScoredDoc {
  std::string doc_id;
  double bm25 = 0.0;
  double sim_vec = 0.0;
  double hybrid = 0.0;
  std::optional<double> rerank;
};

nlohmann::json to_json(const Doc& d);
Doc doc_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScoredDoc& d);

/// One Doc per line; blank lines skipped.
std::vector<Doc> parse_corpus(std::string_view jsonl);
std::vector<Doc> load_corpus(const std::string& path);

class EmbedderPort {
 public:
  virtual ~EmbedderPort() = default;
  /// Unit-normalized (or all-zero for text with no tokens).
  virtual std::vector<double> embed(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;
};

/// Signed feature hashing of tokens (FNV-1a 64) into a fixed number of
/// buckets, then L2 normalization.
class HashingEmbedder final : public EmbedderPort {
 public:
  explicit HashingEmbedder(std::size_t dimension = 64, TokenizerMode mode = TokenizerMode::Words)
      : dim_(dimension), mode_(mode) {}
  std::vector<double> embed(std::string_view text) const override;
  std::size_t dimension() const override { return dim_; }

 private:
  std::size_t dim_;
  TokenizerMode mode_;
};

std::uint64_t fnv1a64(std::string_view s);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Immutable after build.
class Index {
 public:
  static Index build(std::vector<Doc> docs, std::shared_ptr<const EmbedderPort> embedder,
                     TokenizerMode mode = TokenizerMode::Words, Bm25Params params = {});

  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  const std::vector<Doc>& docs() const { return docs_; }
  const Doc* find(std::string_view doc_id) const;
  const EmbedderPort& embedder() const { return *embedder_; }
  TokenizerMode tokenizer_mode() const { return mode_; }
  std::size_t postings_targets() const;  // docs with at least one term

  /// Okapi BM25 of doc `i` against the distinct terms of `query`.
  double bm25(std::size_t i, const std::vector<std::string>& query_terms) const;
  const std::vector<double>& vector(std::size_t i) const { return vectors_[i]; }
  std::size_t position(std::string_view doc_id) const;

 private:
  struct Posting {
    std::size_t doc;
    std::size_t tf;
  };
  std::vector<Doc> docs_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::unordered_map<std::string, std::size_t>> tf_;
  std::vector<std::size_t> doc_len_;
  double avgdl_ = 0.0;
  std::vector<std::vector<double>> vectors_;
  std::shared_ptr<const EmbedderPort> embedder_;
  TokenizerMode mode_ = TokenizerMode::Words;
  Bm25Params params_;

  friend std::vector<ScoredDoc> bm25_search(const Index&, std::string_view, std::size_t);
};

/// Docs sharing at least one query term, by descending score then doc_id.
std::vector<ScoredDoc> bm25_search(const Index& index, std::string_view query, std::size_t k);

/// Every doc by descending cosine similarity then doc_id.
std::vector<ScoredDoc> vector_search(const Index& index, std::string_view query, std::size_t k);
std::vector<ScoredDoc> vector_search(const Index& index, std::string_view query, std::size_t k,
                                     const EmbedderPort& embedder);

double hybrid_score(double alpha, double sim_norm, double bm25_norm);

/// Candidates are the union of both top-k lists; similarity maps to
/// (s+1)/2, BM25 is min-max scaled within the candidates (1.0 when all equal).
std::vector<ScoredDoc> hybrid_search(const Index& index, std::string_view query, std::size_t k,
                                     double alpha);

class RerankerPort {
 public:
  virtual ~RerankerPort() = default;
  virtual std::vector<ScoredDoc> rerank(std::string_view query, std::vector<ScoredDoc> docs,
                                        const Index& index) const = 0;
};

class IdentityReranker final : public RerankerPort {
 public:
  std::vector<ScoredDoc> rerank(std::string_view query, std::vector<ScoredDoc> docs,
                                const Index& index) const override;
};

/// Scores each doc by the fraction of distinct query terms it contains.
class OverlapReranker final : public RerankerPort {
 public:
  std::vector<ScoredDoc> rerank(std::string_view query, std::vector<ScoredDoc> docs,
                                const Index& index) const override;
};

class FilterPort {
 public:
  virtual ~FilterPort() = default;
  /// Ids of the docs worth keeping.
  virtual std::vector<std::string> filter_useful(const std::vector<Doc>& docs, const Doc& base) const = 0;
};

class AcceptAllFilter final : public FilterPort {
 public:
  std::vector<std::string> filter_useful(const std::vector<Doc>& docs, const Doc& base) const override;
};

class QueryGenPort {
 public:
  virtual ~QueryGenPort() = default;
  virtual std::vector<std::string> gen_queries(const Doc& base) const = 0;
};

class EchoQueryGen final : public QueryGenPort {
 public:
  std::vector<std::string> gen_queries(const Doc& base) const override { return {base.text}; }
};

struct ExpansionPorts {
  const QueryGenPort* query_gen = nullptr;
  const RerankerPort* reranker = nullptr;
  const FilterPort* filter = nullptr;
};

/// Generate queries for `base`; for each run hybrid search, rerank, then
/// filter; return the union in first-seen order without duplicates.
std::vector<Doc> expand_article(const Doc& base, const Index& index, const ExpansionPorts& ports,
                                double alpha = 0.8, std::size_t k = 10);

}  // namespace lexv
