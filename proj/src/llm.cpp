#include "lexv/llm.hpp"

#include "lexv/json.hpp"
#include "lexv/prompts.hpp"
#include "lexv/tokenizer.hpp"
#include "lexv/verification.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <set>
#include <unordered_set>

namespace lexv {

std::string render_prompt(std::string_view name, const std::map<std::string, std::string>& vars) {
  const PromptTemplate* tpl = nullptr;
  for (const auto& t : prompt_templates())
    if (t.name == name) tpl = &t;
  if (!tpl) throw Error("unknown prompt template '" + std::string(name) + "'");

  std::string out;
  std::string_view text = tpl->text;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    std::size_t close = text.find("}}", open);
    if (close == std::string_view::npos) break;
    std::string key(text.substr(open + 2, close - open - 2));
    auto it = vars.find(key);
    if (it == vars.end()) throw Error("prompt '" + std::string(name) + "' needs a value for {{" + key + "}}");
    out.append(text.substr(pos, open - pos));
    out += it->second;
    pos = close + 2;
  }
  out.append(text.substr(pos));
  return out;
}

std::string prompt_task(std::string_view prompt) {
  constexpr std::string_view marker = "### task:";
  std::size_t p = prompt.find(marker);
  if (p == std::string_view::npos) return "";
  std::size_t end = prompt.find('\n', p);
  return normalize_line(prompt.substr(p + marker.size(), end == std::string_view::npos ? end : end - p - marker.size()));
}

std::string prompt_payload(std::string_view prompt) {
  constexpr std::string_view open = "<<<PAYLOAD\n", close = "\nPAYLOAD>>>";
  std::size_t a = prompt.find(open);
  if (a == std::string_view::npos) return "";
  a += open.size();
  std::size_t b = prompt.find(close, a);
  if (b == std::string_view::npos) return "";
  return std::string(prompt.substr(a, b - a));
}

std::vector<std::string> content_words(std::string_view text) {
  static const std::unordered_set<std::string> stop = {
      "the", "and", "for", "with", "that", "this", "from", "into", "are", "was", "were", "has", "have",
      "had", "not", "any", "all", "may", "shall", "must", "its", "their", "which", "who", "whom", "such",
      "other", "than", "then", "when", "where", "under", "upon", "each", "been", "being", "also", "one",
      "two", "per", "but", "nor", "can", "will", "article", "paragraph", "之", "的", "或", "及", "與",
      "与", "者", "於", "于", "為", "为", "其", "應", "应", "得", "不", "第", "條", "条", "項", "项"};
  std::vector<std::string> out;
  for (auto& tok : tokenize(text)) {
    bool ascii = std::all_of(tok.begin(), tok.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    if (ascii && tok.size() < 3) continue;
    if (ascii && std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
    if (stop.count(tok)) continue;
    out.push_back(std::move(tok));
  }
  return out;
}

namespace {

const std::regex& clause_prefix() {
  static const std::regex re(default_patterns(Language::En).clause + "|" + default_patterns(Language::Zh).clause);
  return re;
}

std::string strip_enumerator(const std::string& clause) {
  static const std::regex en(R"(^\(?\d+[.)]\s+)");
  std::smatch m;
  if (std::regex_search(clause, m, en)) return clause.substr(m.length(0));
  constexpr std::string_view mark = "、";
  if (auto p = clause.find(mark); p != std::string::npos && p <= 12) return clause.substr(p + mark.size());
  return clause;
}

std::string first_sentence(const std::string& text) {
  std::size_t cut = text.size();
  for (std::string_view stop : {"。", "；", ";", "?", "!"})
    if (auto p = text.find(stop); p != std::string::npos) cut = std::min(cut, p);
  for (std::size_t i = 0; i + 1 <= text.size() && i < cut; ++i)
    if (text[i] == '.' && (i + 1 == text.size() || text[i + 1] == ' ')) {
      cut = i;
      break;
    }
  return normalize_line(text.substr(0, cut));
}

std::string extract_json_text(const std::string& raw, char open, char close) {
  static const std::regex fence("```(?:json)?[ \\t]*\\n([\\s\\S]*?)```");
  std::smatch m;
  std::string body = std::regex_search(raw, m, fence) ? m[1].str() : raw;
  auto a = body.find(open);
  auto b = body.rfind(close);
  if (a == std::string::npos || b == std::string::npos || b < a) return "";
  return body.substr(a, b - a + 1);
}

std::string mock_synthesize(const nlohmann::json& payload) {
  std::string case_text = payload.value("case_text", "");
  static const std::regex fence("```json[ \\t]*\\n([\\s\\S]*?)```");
  std::smatch m;
  if (std::regex_search(case_text, m, fence)) return m[1].str();
  auto parsed = nlohmann::json::parse(case_text, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_object()) return case_text;
  return "{}";
}

std::string mock_gen_queries(const nlohmann::json& payload) {
  nlohmann::json out = nlohmann::json::array();
  std::string title = payload.value("title", "");
  if (!title.empty()) out.push_back(title);
  for (const auto& c : payload.value("clauses", std::vector<std::string>{})) {
    auto s = first_sentence(strip_enumerator(c));
    if (!s.empty()) out.push_back(s);
  }
  if (out.empty()) {
    auto s = first_sentence(payload.value("content", ""));
    if (!s.empty()) out.push_back(s);
  }
  return out.dump();
}

std::string mock_filter(const nlohmann::json& payload) {
  std::set<std::string> base;
  for (auto& w : content_words(payload.value("base", ""))) base.insert(std::move(w));
  nlohmann::json keep = nlohmann::json::array();
  for (const auto& d : payload.value("docs", nlohmann::json::array())) {
    auto words = content_words(d.value("text", ""));
    if (std::any_of(words.begin(), words.end(), [&](const std::string& w) { return base.count(w) > 0; }))
      keep.push_back(d.value("doc_id", ""));
  }
  return keep.dump();
}

}  // namespace

std::string MockCompletionPort::complete(const std::string& prompt, const CompletionParams&) {
  const std::string task = prompt_task(prompt);
  const std::string raw = prompt_payload(prompt);
  if (task == "phrase_trace") return raw;
  auto payload = nlohmann::json::parse(raw, nullptr, false);
  if (payload.is_discarded() || !payload.is_object()) return "";
  if (task == "gen_queries") return mock_gen_queries(payload);
  if (task == "filter_useful") return mock_filter(payload);
  if (task == "synthesize" || task == "repair") return mock_synthesize(payload);
  return "";
}

std::string ScriptedCompletionPort::complete(const std::string& prompt, const CompletionParams&) {
  std::lock_guard lock(mu_);
  prompts_.push_back(prompt);
  if (responses_.empty()) return "";
  std::size_t i = std::min(prompts_.size() - 1, responses_.size() - 1);
  return responses_[i];
}

std::vector<std::string> ScriptedCompletionPort::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

std::size_t ScriptedCompletionPort::calls() const {
  std::lock_guard lock(mu_);
  return prompts_.size();
}

nlohmann::json HttpCompletionPort::request_body(const std::string& model, const std::string& prompt,
                                                const CompletionParams& params) {
  nlohmann::json body = {{"model", model},
                         {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                         {"temperature", params.temperature},
                         {"max_tokens", params.max_tokens}};
  if (params.seed) body["seed"] = *params.seed;
  return body;
}

std::string HttpCompletionPort::parse_response(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw LlmError("completion endpoint returned non-JSON body");
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw LlmError("completion response lacks choices[0].message.content");
  }
}

std::string HttpCompletionPort::complete(const std::string& prompt, const CompletionParams& params) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg_.endpoint, m, url)) throw LlmError("bad completion endpoint: " + cfg_.endpoint);
  httplib::Client cli(m[1].str());
  cli.set_connection_timeout(cfg_.timeout_s, 0);
  cli.set_read_timeout(cfg_.timeout_s, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);
  std::string path = m[2].matched ? m[2].str() : "/";
  auto res = cli.Post(path, headers, request_body(cfg_.model, prompt, params).dump(), "application/json");
  if (!res) throw LlmError("completion request failed: " + httplib::to_string(res.error()));
  if (res->status / 100 != 2)
    throw LlmError("completion endpoint answered HTTP " + std::to_string(res->status) + ": " +
                   res->body.substr(0, 200));
  return parse_response(res->body);
}

ArticleParts split_article(const Doc& doc) {
  ArticleParts parts;
  parts.title = doc.title;
  std::size_t pos = 0;
  bool in_clause = false;
  while (pos <= doc.text.size()) {
    std::size_t nl = doc.text.find('\n', pos);
    if (nl == std::string::npos) nl = doc.text.size();
    std::string line = normalize_line(std::string_view(doc.text).substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;
    if (std::regex_match(line, clause_prefix())) {
      parts.clauses.push_back(line);
      in_clause = true;
    } else if (in_clause) {
      parts.clauses.back() += " " + line;
    } else {
      parts.content += parts.content.empty() ? line : " " + line;
    }
  }
  return parts;
}

namespace {

std::vector<std::string> parse_string_array(const std::string& raw) {
  auto j = nlohmann::json::parse(extract_json_text(raw, '[', ']'), nullptr, false);
  std::vector<std::string> out;
  if (j.is_discarded() || !j.is_array()) return out;
  for (const auto& e : j)
    if (e.is_string()) out.push_back(e.get<std::string>());
  return out;
}

}  // namespace

std::vector<std::string> gen_queries(const Doc& base, CompletionPort& port, const CompletionParams& params) {
  const ArticleParts parts = split_article(base);
  const nlohmann::json payload = {
      {"doc_id", base.doc_id}, {"title", parts.title}, {"content", parts.content}, {"clauses", parts.clauses}};
  const std::string prompt = render_prompt("gen_queries", {{"payload", payload.dump(2)}});

  CompletionParams p = params;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (auto& q : parse_string_array(port.complete(prompt, p))) {
      q = normalize_line(q);
      if (!q.empty() && seen.insert(q).second) out.push_back(std::move(q));
    }
    if (!out.empty()) return out;
    p.seed = p.seed.value_or(0) + 1;
  }
  throw EmptyGeneration("no queries generated for '" + base.doc_id + "'");
}

std::vector<Doc> filter_useful(const std::vector<Doc>& docs, const Doc& base, CompletionPort& port,
                               const CompletionParams& params) {
  if (docs.empty()) return {};
  nlohmann::json items = nlohmann::json::array();
  for (const auto& d : docs) items.push_back({{"doc_id", d.doc_id}, {"text", d.text}});
  const std::string base_text = base.title.empty() ? base.text : base.title + "\n" + base.text;
  const nlohmann::json payload = {{"base", base_text}, {"docs", items}};
  const std::string raw = port.complete(render_prompt("filter_useful", {{"payload", payload.dump(2)}}), params);

  const auto ids = parse_string_array(raw);
  const std::unordered_set<std::string> keep(ids.begin(), ids.end());
  std::vector<Doc> out;
  std::unordered_set<std::string> seen;
  for (const auto& d : docs)
    if (keep.count(d.doc_id) && seen.insert(d.doc_id).second) out.push_back(d);
  return out;
}

std::string phrase_trace_line(const std::string& line, CompletionPort& port, const CompletionParams& params) {
  std::string out = normalize_line(port.complete(render_prompt("phrase_trace", {{"payload", line}}), params));
  return out.empty() ? line : out;
}

std::vector<std::string> LlmQueryGen::gen_queries(const Doc& base) const { return lexv::gen_queries(base, port_); }

std::vector<std::string> LlmFilter::filter_useful(const std::vector<Doc>& docs, const Doc& base) const {
  std::vector<std::string> ids;
  for (const auto& d : lexv::filter_useful(docs, base, port_)) ids.push_back(d.doc_id);
  return ids;
}

std::string SynthesisAttempt::feedback() const {
  if (!parse_error.empty()) return "parse error: " + parse_error;
  if (!validation_errors.empty()) {
    std::string s = "validation failed:";
    for (const auto& e : validation_errors) s += "\n- " + e;
    return s;
  }
  return solver_feedback;
}

nlohmann::json to_json(const SynthesisAttempt& a) {
  nlohmann::json j = {{"attempt", a.index},
                      {"prompt", a.prompt},
                      {"raw_output", a.raw_output},
                      {"parse_error", a.parse_error},
                      {"validation_errors", a.validation_errors},
                      {"solver_feedback", a.solver_feedback},
                      {"accepted", a.accepted}};
  j["bundle"] = a.bundle ? bundle_to_json(*a.bundle) : nlohmann::json(nullptr);
  return j;
}

namespace {

std::string join_ids(const std::set<std::string>& ids) {
  std::string s;
  for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
  return s;
}

/// Runs one candidate through parse, validation and the solver gate.
void judge(SynthesisAttempt& a, const Solver& solver) {
  const std::string text = extract_json_text(a.raw_output, '{', '}');
  if (text.empty()) {
    a.parse_error = "no JSON object found in the answer";
    return;
  }
  try {
    a.bundle = bundle_from_json(nlohmann::json::parse(text));
  } catch (const std::exception& e) {
    a.parse_error = e.what();
    return;
  }
  for (const auto& e : validate_bundle(*a.bundle))
    a.validation_errors.push_back(std::string(code_name(e.code)) + " " + e.subject + ": " + e.message);
  if (!a.validation_errors.empty()) return;

  Verdict law, illegal;
  try {
    law = check_law_consistency(*a.bundle, solver);
    if (law.status == Status::Sat) illegal = check_case_illegality(*a.bundle, solver, false);
  } catch (const ProtocolError& e) {
    a.solver_feedback = std::string("solver rejected the encoding: ") + e.what();
    return;
  }
  if (law.status != Status::Sat) {
    a.solver_feedback = "law consistency check returned " + std::string(status_name(law.status)) +
                        "; conflicting HARD constraints: " + join_ids(law.core_ids());
    return;
  }
  if (illegal.status != Status::Unsat) {
    a.solver_feedback = "case illegality check returned " + std::string(status_name(illegal.status)) +
                        ", expected unsat: with " + a.bundle->penalty_var +
                        " = false the facts remain consistent with the law, so the encoding misses the violation";
    return;
  }
  a.accepted = true;
}

}  // namespace

SynthesisResult synthesize_bundle(const std::string& case_text, const ArticleMap& articles, CompletionPort& port,
                                  const Solver& solver, const SynthesisOptions& opts) {
  if (opts.max_repair_rounds < 1) throw Error("max_repair_rounds must be at least 1");
  const nlohmann::json payload = {{"case_text", case_text}, {"articles", articles.to_json()}};
  const std::string schema = bundle_schema().dump(2);

  std::vector<SynthesisAttempt> log;
  for (int i = 1; i <= opts.max_repair_rounds; ++i) {
    SynthesisAttempt a;
    a.index = i;
    if (log.empty()) {
      a.prompt = render_prompt("synthesize", {{"payload", payload.dump(2)}, {"schema", schema}});
    } else {
      a.prompt = render_prompt("repair", {{"payload", payload.dump(2)},
                                          {"schema", schema},
                                          {"error", log.back().feedback()},
                                          {"previous", log.back().raw_output}});
    }
    a.raw_output = port.complete(a.prompt, opts.params);
    judge(a, solver);
    log.push_back(a);
    if (a.accepted) return {*a.bundle, std::move(log)};
  }
  throw SynthesisExhausted(std::move(log));
}

}  // namespace lexv
