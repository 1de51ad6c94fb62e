#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lexv {

enum class Language { En, Zh };

/// Regular expressions driving article/clause extraction. `article` must
/// capture the article number in group 1, an optional sub-number in group 2
/// and the trailing title text in group 3.
struct PatternSet {
  Language language = Language::En;
  std::string article;
  std::string clause;
  std::vector<std::string> headings;
  std::string joiner = " ";  // between lines merged into one field
};

/// Throws Error("unknown language") for anything but "en"/"zh".
PatternSet default_patterns(std::string_view language);
PatternSet default_patterns(Language language);

/// Overrides fields of `base` from a JSON config
/// `{article?, clause?, headings?[], joiner?}`.
PatternSet patterns_from_json(const nlohmann::json& cfg, PatternSet base);

struct Article {
  std::string title;
  std::vector<std::string> clauses;
  std::string content;

  friend bool operator==(const Article&, const Article&) = default;
};

struct ArticleMap {
  std::vector<std::string> order;  // first-appearance order
  std::map<std::string, Article> articles;
  std::size_t discarded_lines = 0;  // text before the first article
  std::size_t heading_lines = 0;

  bool empty() const { return order.empty(); }
  std::size_t size() const { return order.size(); }
  const Article& at(const std::string& number) const { return articles.at(number); }

  /// `{ "<number>": {title, clauses[], content}, ... }` in document order.
  nlohmann::ordered_json to_json() const;
  static ArticleMap from_json(const nlohmann::ordered_json& j);
};

/// Line-oriented state machine: normalize each line; skip headings; an
/// article header opens a new article and clears the clause cursor; clause
/// lines start clauses; other lines continue the open clause or, before any
/// clause, extend the article content. Lines before the first article are
/// discarded and counted.
ArticleMap extract_articles(std::string_view text, const PatternSet& patterns);

/// Text that extract_articles parses back into `m`.
std::string render_articles(const ArticleMap& m, const PatternSet& patterns);

/// Strip and collapse whitespace (ASCII and U+3000).
std::string normalize_line(std::string_view line);

/// "一四三" -> "143", "一百四十三" -> "143", "１２" -> "12"; digits pass through.
std::string normalize_numeral(std::string_view numeral);

}  // namespace lexv
