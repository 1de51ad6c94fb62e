#pragma once

#include "lexv/bundle.hpp"
#include "lexv/errors.hpp"
#include "lexv/legal_parser.hpp"
#include "lexv/retrieval.hpp"
#include "lexv/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace lexv {

struct CompletionParams {
  double temperature = 0.0;
  int max_tokens = 2048;
  std::optional<std::uint64_t> seed;
};

class CompletionPort {
 public:
  virtual ~CompletionPort() = default;
  virtual std::string complete(const std::string& prompt, const CompletionParams& params) = 0;
};

/// Deterministic stand-in. Reads the `### task:` line and the payload block
/// of a rendered template and answers by fixed rules:
///   gen_queries   title, then the first sentence of each clause
///   filter_useful ids of docs sharing a content word with the base
///   synthesize / repair   first ```json block of the case text, else the
///                 case text itself when it is a JSON object, else "{}"
///   phrase_trace  the line unchanged
class MockCompletionPort final : public CompletionPort {
 public:
  std::string complete(const std::string& prompt, const CompletionParams& params) override;
};

/// Replays canned responses in order; the last one repeats once exhausted.
class ScriptedCompletionPort final : public CompletionPort {
 public:
  explicit ScriptedCompletionPort(std::vector<std::string> responses) : responses_(std::move(responses)) {}
  std::string complete(const std::string& prompt, const CompletionParams& params) override;
  std::vector<std::string> prompts() const;
  std::size_t calls() const;

 private:
  std::vector<std::string> responses_;
  std::vector<std::string> prompts_;
  mutable std::mutex mu_;
};

struct HttpPortConfig {
  std::string endpoint;  // e.g. https://host/v1/chat/completions
  std::string model;
  std::string api_key_env = "LEXV_LLM_KEY";
  int timeout_s = 60;
};

/// Minimal chat-completion client; see docs/llm-port.md.
class HttpCompletionPort final : public CompletionPort {
 public:
  explicit HttpCompletionPort(HttpPortConfig cfg) : cfg_(std::move(cfg)) {}
  std::string complete(const std::string& prompt, const CompletionParams& params) override;

  static nlohmann::json request_body(const std::string& model, const std::string& prompt,
                                     const CompletionParams& params);
  static std::string parse_response(const std::string& body);

 private:
  HttpPortConfig cfg_;
};

/// `### task:` value of a rendered prompt ("" when absent).
std::string prompt_task(std::string_view prompt);
/// Text between the payload markers ("" when absent).
std::string prompt_payload(std::string_view prompt);

/// Title, content and clauses of a corpus doc, split with the clause
/// patterns of both default languages.
struct ArticleParts {
  std::string title;
  std::string content;
  std::vector<std::string> clauses;
};
ArticleParts split_article(const Doc& doc);

/// Nonempty, deduplicated. One retry with a bumped seed on empty output,
/// then EmptyGeneration.
std::vector<std::string> gen_queries(const Doc& base, CompletionPort& port, const CompletionParams& params = {});

/// Always a subset of `docs`, in input order; unknown ids are ignored.
std::vector<Doc> filter_useful(const std::vector<Doc>& docs, const Doc& base, CompletionPort& port,
                               const CompletionParams& params = {});

/// Optional rephrasing of one trace line; falls back to the line itself.
std::string phrase_trace_line(const std::string& line, CompletionPort& port, const CompletionParams& params = {});

class LlmQueryGen final : public QueryGenPort {
 public:
  explicit LlmQueryGen(CompletionPort& port) : port_(port) {}
  std::vector<std::string> gen_queries(const Doc& base) const override;

 private:
  CompletionPort& port_;
};

class LlmFilter final : public FilterPort {
 public:
  explicit LlmFilter(CompletionPort& port) : port_(port) {}
  std::vector<std::string> filter_useful(const std::vector<Doc>& docs, const Doc& base) const override;

 private:
  CompletionPort& port_;
};

struct SynthesisAttempt {
  int index = 0;  // from 1
  std::string prompt;
  std::string raw_output;
  std::optional<ConstraintBundle> bundle;
  std::string parse_error;
  std::vector<std::string> validation_errors;
  std::string solver_feedback;
  bool accepted = false;

  /// The rejection reason fed into the next repair prompt.
  std::string feedback() const;
};

nlohmann::json to_json(const SynthesisAttempt& a);

class SynthesisExhausted : public Error {
 public:
  explicit SynthesisExhausted(std::vector<SynthesisAttempt> attempts)
      : Error("synthesis exhausted after " + std::to_string(attempts.size()) + " attempts"),
        attempts_(std::move(attempts)) {}
  const std::vector<SynthesisAttempt>& attempts() const noexcept { return attempts_; }

 private:
  std::vector<SynthesisAttempt> attempts_;
};

struct SynthesisOptions {
  int max_repair_rounds = 3;
  CompletionParams params;
};

struct SynthesisResult {
  ConstraintBundle bundle;
  std::vector<SynthesisAttempt> attempts;
};

/// Prompt, parse, validate, then require a SAT law check and an UNSAT case
/// check; every failure is fed back verbatim in a repair prompt.
SynthesisResult synthesize_bundle(const std::string& case_text, const ArticleMap& articles, CompletionPort& port,
                                  const Solver& solver, const SynthesisOptions& opts = {});

/// Stopword-filtered tokens used by the mock usefulness rule.
std::vector<std::string> content_words(std::string_view text);

}  // namespace lexv
