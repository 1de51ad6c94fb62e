#include "lexv/legal_parser.hpp"

#include "lexv/errors.hpp"

#include <regex>

namespace lexv {

namespace {

// UTF-8 alternation; std::regex works on bytes, so no bracket classes.
const std::string kZhNumeral =
    "(?:[0-9]|０|１|２|３|４|５|６|７|８|９|零|〇|○|一|二|三|四|五|六|七|八|九|十|百|千)+";

}  // namespace

PatternSet default_patterns(Language language) {
  PatternSet p;
  p.language = language;
  if (language == Language::En) {
    p.article = R"(^Article\s+(\d+(?:-\d+)*)()(?:\s+(.*))?$)";
    p.clause = R"(^\(?\d+[.)]\s+\S.*$)";
    p.headings = {R"(^(?:Chapter|Section|Part|CHAPTER|SECTION|PART)\s+[0-9IVXLCivxlc]+\b.*$)"};
    p.joiner = " ";
  } else {
    p.article = "^第\\s*(" + kZhNumeral + ")\\s*(?:條|条)(?:\\s*之\\s*(" + kZhNumeral + "))?\\s*(.*)$";
    p.clause = "^(?:" + kZhNumeral + ")、.*$";
    p.headings = {"^第\\s*" + kZhNumeral + "\\s*(?:章|節|节|編|编|款)(?:\\s.*|$|.*)$"};
    p.joiner = "";
  }
  return p;
}

PatternSet default_patterns(std::string_view language) {
  if (language == "en" || language == "EN") return default_patterns(Language::En);
  if (language == "zh" || language == "ZH") return default_patterns(Language::Zh);
  throw Error("unknown language '" + std::string(language) + "' (expected en or zh)");
}

PatternSet patterns_from_json(const nlohmann::json& cfg, PatternSet base) {
  if (cfg.contains("article")) base.article = cfg["article"].get<std::string>();
  if (cfg.contains("clause")) base.clause = cfg["clause"].get<std::string>();
  if (cfg.contains("headings")) base.headings = cfg["headings"].get<std::vector<std::string>>();
  if (cfg.contains("joiner")) base.joiner = cfg["joiner"].get<std::string>();
  return base;
}

std::string normalize_line(std::string_view line) {
  std::string out;
  bool pending_space = false;
  for (std::size_t i = 0; i < line.size();) {
    unsigned char c = static_cast<unsigned char>(line[i]);
    bool space = c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    std::size_t len = 1;
    if (c == 0xE3 && i + 2 < line.size() && static_cast<unsigned char>(line[i + 1]) == 0x80 &&
        static_cast<unsigned char>(line[i + 2]) == 0x80) {
      space = true;  // U+3000 ideographic space
      len = 3;
    }
    if (space) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += line[i];
    }
    i += len;
  }
  return out;
}

std::string normalize_numeral(std::string_view s) {
  static const std::map<std::string, int, std::less<>> digits = {
      {"零", 0}, {"〇", 0}, {"○", 0}, {"一", 1}, {"二", 2}, {"三", 3}, {"四", 4},
      {"五", 5}, {"六", 6}, {"七", 7}, {"八", 8}, {"九", 9},
      {"０", 0}, {"１", 1}, {"２", 2}, {"３", 3}, {"４", 4},
      {"５", 5}, {"６", 6}, {"７", 7}, {"８", 8}, {"９", 9}};
  static const std::map<std::string, int, std::less<>> units = {{"十", 10}, {"百", 100}, {"千", 1000}};

  std::vector<std::string> glyphs;
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : 4;
    glyphs.emplace_back(s.substr(i, len));
    i += len;
  }
  bool positional = false;
  for (const auto& g : glyphs) positional = positional || units.count(g);

  if (!positional) {
    std::string out;
    for (const auto& g : glyphs) {
      if (g.size() == 1 && std::isdigit(static_cast<unsigned char>(g[0]))) {
        out += g;
      } else if (auto it = digits.find(g); it != digits.end()) {
        out += static_cast<char>('0' + it->second);
      } else {
        return std::string(s);
      }
    }
    return out;
  }

  long total = 0, current = 0;
  for (const auto& g : glyphs) {
    if (auto d = digits.find(g); d != digits.end()) {
      current = d->second;
    } else if (g.size() == 1 && std::isdigit(static_cast<unsigned char>(g[0]))) {
      current = current * 10 + (g[0] - '0');
    } else if (auto u = units.find(g); u != units.end()) {
      total += (current == 0 ? 1 : current) * u->second;
      current = 0;
    } else {
      return std::string(s);
    }
  }
  return std::to_string(total + current);
}

namespace {

struct Compiled {
  std::regex article;
  std::regex clause;
  std::vector<std::regex> headings;
};

Compiled compile(const PatternSet& p) {
  try {
    Compiled c{std::regex(p.article), std::regex(p.clause), {}};
    for (const auto& h : p.headings) c.headings.emplace_back(h);
    return c;
  } catch (const std::regex_error& e) {
    throw Error(std::string("invalid extraction pattern: ") + e.what());
  }
}

void append(std::string& field, const std::string& line, const std::string& joiner) {
  if (!field.empty()) field += joiner;
  field += line;
}

}  // namespace

ArticleMap extract_articles(std::string_view text, const PatternSet& patterns) {
  const Compiled re = compile(patterns);
  ArticleMap out;
  Article* open = nullptr;
  bool in_clause = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string line = normalize_line(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;

    bool heading = false;
    for (const auto& h : re.headings) heading = heading || std::regex_match(line, h);
    if (heading) {
      ++out.heading_lines;
      continue;
    }

    std::smatch m;
    if (std::regex_match(line, m, re.article)) {
      std::string key = normalize_numeral(m[1].str());
      if (m.size() > 2 && m[2].matched && m[2].length() > 0) key += "-" + normalize_numeral(m[2].str());
      std::string title = m.size() > 3 && m[3].matched ? m[3].str() : "";
      auto [it, fresh] = out.articles.try_emplace(key);
      if (fresh) {
        out.order.push_back(key);
        it->second.title = title;
      } else if (!title.empty()) {
        // A repeated header continues the same article.
        append(it->second.title, title, patterns.joiner);
      }
      open = &it->second;
      in_clause = false;
    } else if (open) {
      if (std::regex_match(line, re.clause)) {
        open->clauses.push_back(line);
        in_clause = true;
      } else if (in_clause) {
        append(open->clauses.back(), line, patterns.joiner);
      } else {
        append(open->content, line, patterns.joiner);
      }
    } else {
      ++out.discarded_lines;
    }
  }
  return out;
}

std::string render_articles(const ArticleMap& m, const PatternSet& patterns) {
  std::string out;
  for (const auto& key : m.order) {
    const Article& a = m.at(key);
    std::string header;
    if (patterns.language == Language::Zh) {
      auto dash = key.find('-');
      header = "第" + key.substr(0, dash) + "條";
      if (dash != std::string::npos) header += "之" + key.substr(dash + 1);
    } else {
      header = "Article " + key;
    }
    if (!a.title.empty()) header += " " + a.title;
    out += header + "\n";
    if (!a.content.empty()) out += a.content + "\n";
    for (const auto& c : a.clauses) out += c + "\n";
  }
  return out;
}

nlohmann::ordered_json ArticleMap::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& key : order) {
    const Article& a = articles.at(key);
    j[key] = {{"title", a.title}, {"clauses", a.clauses}, {"content", a.content}};
  }
  return j;
}

ArticleMap ArticleMap::from_json(const nlohmann::ordered_json& j) {
  ArticleMap m;
  if (!j.is_object()) throw Error("article map must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    Article a;
    a.title = it.value().value("title", "");
    a.content = it.value().value("content", "");
    a.clauses = it.value().value("clauses", std::vector<std::string>{});
    m.order.push_back(it.key());
    m.articles.emplace(it.key(), std::move(a));
  }
  return m;
}

}  // namespace lexv
