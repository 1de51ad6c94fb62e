#include "lexv/retrieval.hpp"

#include "lexv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace lexv {

nlohmann::json to_json(const Doc& d) {
  nlohmann::json j = {{"doc_id", d.doc_id}, {"text", d.text}, {"law", d.law}, {"article", d.article}};
  if (!d.title.empty()) j["title"] = d.title;
  return j;
}

Doc doc_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("doc_id") || !j.contains("text"))
    throw Error("corpus entry needs doc_id and text");
  Doc d;
  d.doc_id = j["doc_id"].get<std::string>();
  d.text = j["text"].get<std::string>();
  d.law = j.value("law", "");
  d.article = j.value("article", "");
  d.title = j.value("title", "");
  return d;
}

nlohmann::json to_json(const ScoredDoc& d) {
  nlohmann::json j = {{"doc_id", d.doc_id}, {"bm25", d.bm25}, {"sim_vec", d.sim_vec}, {"hybrid", d.hybrid}};
  j["rerank"] = d.rerank ? nlohmann::json(*d.rerank) : nlohmann::json(nullptr);
  return j;
}

std::vector<Doc> parse_corpus(std::string_view jsonl) {
  std::vector<Doc> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(doc_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Doc> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str());
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> HashingEmbedder::embed(std::string_view text) const {
  std::vector<double> v(dim_, 0.0);
  for (const auto& tok : tokenize(text, mode_)) {
    std::uint64_t h = fnv1a64(tok);
    v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

namespace {

std::vector<std::string> distinct(std::vector<std::string> terms) {
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  return terms;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_dimension(const std::vector<double>& v, std::size_t dim) {
  if (v.size() != dim) throw DimensionMismatch(dim, v.size());
}

void truncate(std::vector<ScoredDoc>& v, std::size_t k) {
  if (v.size() > k) v.resize(k);
}

}  // namespace

Index Index::build(std::vector<Doc> docs, std::shared_ptr<const EmbedderPort> embedder, TokenizerMode mode,
                   Bm25Params params) {
  if (!embedder) throw Error("index needs an embedder");
  Index ix;
  ix.embedder_ = std::move(embedder);
  ix.mode_ = mode;
  ix.params_ = params;
  ix.docs_ = std::move(docs);
  std::size_t total = 0;
  for (std::size_t i = 0; i < ix.docs_.size(); ++i) {
    const Doc& d = ix.docs_[i];
    if (!ix.by_id_.emplace(d.doc_id, i).second) throw DuplicateDoc(d.doc_id);
    auto toks = tokenize(d.text, mode);
    std::unordered_map<std::string, std::size_t> tf;
    for (auto& t : toks) ++tf[t];
    for (auto& [term, n] : tf) ix.postings_[term].push_back({i, n});
    ix.doc_len_.push_back(toks.size());
    total += toks.size();
    ix.tf_.push_back(std::move(tf));
    auto vec = ix.embedder_->embed(d.text);
    check_dimension(vec, ix.embedder_->dimension());
    ix.vectors_.push_back(std::move(vec));
  }
  ix.avgdl_ = ix.docs_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(ix.docs_.size());
  return ix;
}

const Doc* Index::find(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  return it == by_id_.end() ? nullptr : &docs_[it->second];
}

std::size_t Index::position(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  if (it == by_id_.end()) throw NotFound("unknown doc_id: " + std::string(doc_id));
  return it->second;
}

std::size_t Index::postings_targets() const {
  std::set<std::size_t> seen;
  for (const auto& [term, plist] : postings_)
    for (const auto& p : plist) seen.insert(p.doc);
  return seen.size();
}

double Index::bm25(std::size_t i, const std::vector<std::string>& query_terms) const {
  const double n_docs = static_cast<double>(docs_.size());
  const double dl = static_cast<double>(doc_len_[i]);
  double score = 0.0;
  for (const auto& term : query_terms) {
    auto tf_it = tf_[i].find(term);
    if (tf_it == tf_[i].end()) continue;
    const double n = static_cast<double>(postings_.at(term).size());
    const double idf = std::log((n_docs - n + 0.5) / (n + 0.5) + 1.0);
    const double tf = static_cast<double>(tf_it->second);
    score += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * (1.0 - params_.b + params_.b * dl / avgdl_));
  }
  return score;
}

std::vector<ScoredDoc> bm25_search(const Index& index, std::string_view query, std::size_t k) {
  if (k == 0) throw Error("k must be at least 1");
  const auto terms = distinct(tokenize(query, index.mode_));
  std::set<std::size_t> hits;
  for (const auto& t : terms)
    if (auto it = index.postings_.find(t); it != index.postings_.end())
      for (const auto& p : it->second) hits.insert(p.doc);
  std::vector<ScoredDoc> out;
  for (std::size_t i : hits) out.push_back({index.docs_[i].doc_id, index.bm25(i, terms), 0.0, 0.0, std::nullopt});
  std::sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    return a.bm25 != b.bm25 ? a.bm25 > b.bm25 : a.doc_id < b.doc_id;
  });
  truncate(out, k);
  return out;
}

std::vector<ScoredDoc> vector_search(const Index& index, std::string_view query, std::size_t k,
                                     const EmbedderPort& embedder) {
  if (k == 0) throw Error("k must be at least 1");
  if (index.empty()) return {};
  auto q = embedder.embed(query);
  check_dimension(q, index.embedder().dimension());
  std::vector<ScoredDoc> out;
  out.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i)
    out.push_back({index.docs()[i].doc_id, 0.0, dot(q, index.vector(i)), 0.0, std::nullopt});
  std::sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    return a.sim_vec != b.sim_vec ? a.sim_vec > b.sim_vec : a.doc_id < b.doc_id;
  });
  truncate(out, k);
  return out;
}

std::vector<ScoredDoc> vector_search(const Index& index, std::string_view query, std::size_t k) {
  return vector_search(index, query, k, index.embedder());
}

double hybrid_score(double alpha, double sim_norm, double bm25_norm) {
  return alpha * sim_norm + (1.0 - alpha) * bm25_norm;
}

std::vector<ScoredDoc> hybrid_search(const Index& index, std::string_view query, std::size_t k, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("alpha must lie in [0, 1]");
  auto lexical = bm25_search(index, query, k);
  auto dense = vector_search(index, query, k);

  std::vector<std::size_t> candidates;
  std::unordered_set<std::size_t> seen;
  for (const auto* list : {&lexical, &dense})
    for (const auto& d : *list)
      if (std::size_t i = index.position(d.doc_id); seen.insert(i).second) candidates.push_back(i);
  if (candidates.empty()) return {};

  const auto terms = distinct(tokenize(query, index.tokenizer_mode()));
  const auto q = index.embedder().embed(query);
  std::vector<ScoredDoc> out;
  for (std::size_t i : candidates)
    out.push_back({index.docs()[i].doc_id, index.bm25(i, terms), dot(q, index.vector(i)), 0.0, std::nullopt});

  auto [lo, hi] = std::minmax_element(out.begin(), out.end(),
                                      [](const ScoredDoc& a, const ScoredDoc& b) { return a.bm25 < b.bm25; });
  const double min = lo->bm25, max = hi->bm25;
  for (auto& d : out) {
    const double bm25_norm = max > min ? (d.bm25 - min) / (max - min) : 1.0;
    d.hybrid = hybrid_score(alpha, (d.sim_vec + 1.0) / 2.0, bm25_norm);
  }
  // Ties on the blend fall back to the dominant component so the two
  // extremes reproduce the pure rankings exactly.
  const bool semantic = alpha >= 0.5;
  std::sort(out.begin(), out.end(), [semantic](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.hybrid != b.hybrid) return a.hybrid > b.hybrid;
    const double ka = semantic ? a.sim_vec : a.bm25, kb = semantic ? b.sim_vec : b.bm25;
    if (ka != kb) return ka > kb;
    return a.doc_id < b.doc_id;
  });
  truncate(out, k);
  return out;
}

std::vector<ScoredDoc> IdentityReranker::rerank(std::string_view, std::vector<ScoredDoc> docs, const Index&) const {
  for (auto& d : docs) d.rerank = d.hybrid;
  return docs;
}

std::vector<ScoredDoc> OverlapReranker::rerank(std::string_view query, std::vector<ScoredDoc> docs,
                                               const Index& index) const {
  const auto terms = distinct(tokenize(query, index.tokenizer_mode()));
  for (auto& d : docs) {
    const Doc* doc = index.find(d.doc_id);
    auto doc_terms = doc ? distinct(tokenize(doc->text, index.tokenizer_mode())) : std::vector<std::string>{};
    std::size_t shared = 0;
    for (const auto& t : terms) shared += std::binary_search(doc_terms.begin(), doc_terms.end(), t);
    d.rerank = terms.empty() ? 0.0 : static_cast<double>(shared) / static_cast<double>(terms.size());
  }
  std::stable_sort(docs.begin(), docs.end(),
                   [](const ScoredDoc& a, const ScoredDoc& b) { return *a.rerank > *b.rerank; });
  return docs;
}

std::vector<std::string> AcceptAllFilter::filter_useful(const std::vector<Doc>& docs, const Doc&) const {
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.doc_id);
  return ids;
}

namespace {

void require_permutation(const std::vector<ScoredDoc>& in, const std::vector<ScoredDoc>& out) {
  std::multiset<std::string> a, b;
  for (const auto& d : in) a.insert(d.doc_id);
  for (const auto& d : out) b.insert(d.doc_id);
  if (a != b) throw Error("reranker output is not a permutation of its input");
}

}  // namespace

std::vector<Doc> expand_article(const Doc& base, const Index& index, const ExpansionPorts& ports, double alpha,
                                std::size_t k) {
  if (!ports.query_gen || !ports.reranker || !ports.filter) throw Error("expansion ports not wired");
  std::vector<std::string> queries;
  try {
    queries = ports.query_gen->gen_queries(base);
  } catch (const PortFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw PortFailure("<query generation for " + base.doc_id + ">", e.what());
  }

  std::vector<Doc> out;
  std::unordered_set<std::string> seen;
  for (const auto& q : queries) {
    try {
      auto hits = hybrid_search(index, q, k, alpha);
      auto ranked = ports.reranker->rerank(q, hits, index);
      require_permutation(hits, ranked);
      std::vector<Doc> docs;
      for (const auto& h : ranked) docs.push_back(*index.find(h.doc_id));
      std::unordered_set<std::string> keep;
      for (auto& id : ports.filter->filter_useful(docs, base)) keep.insert(std::move(id));
      for (const auto& d : docs)
        if (keep.count(d.doc_id) && seen.insert(d.doc_id).second) out.push_back(d);
    } catch (const PortFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw PortFailure(q, e.what());
    }
  }
  return out;
}

}  // namespace lexv
