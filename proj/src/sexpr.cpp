#include "lexv/sexpr.hpp"

#include "lexv/errors.hpp"

#include <cctype>

namespace lexv {

std::string SExpr::to_string() const {
  switch (type) {
    case Type::Atom: return text;
    case Type::String: {
      std::string s = "\"";
      for (char c : text) {
        if (c == '"') s += '"';
        s += c;
      }
      return s + "\"";
    }
    case Type::List: {
      std::string s = "(";
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) s += ' ';
        s += items[i].to_string();
      }
      return s + ")";
    }
  }
  return {};
}

namespace {

std::string excerpt(std::string_view text, std::size_t pos) {
  std::size_t from = pos > 40 ? pos - 40 : 0;
  return std::string(text.substr(from, 120));
}

class Reader {
 public:
  explicit Reader(std::string_view t) : t_(t) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    for (;;) {
      skip();
      if (pos_ >= t_.size()) break;
      if (t_[pos_] == ')') throw ProtocolError("unbalanced ')' in solver output", excerpt(t_, pos_));
      out.push_back(read());
    }
    return out;
  }

 private:
  void skip() {
    while (pos_ < t_.size()) {
      char c = t_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < t_.size() && t_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= t_.size()) throw ProtocolError("unexpected end of solver output", excerpt(t_, pos_));
    char c = t_[pos_];
    if (c == '(') {
      std::size_t open = pos_++;
      SExpr list;
      list.type = SExpr::Type::List;
      for (;;) {
        skip();
        if (pos_ >= t_.size()) throw ProtocolError("unterminated list in solver output", excerpt(t_, open));
        if (t_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (c == '"') {
      std::size_t open = pos_++;
      SExpr s;
      s.type = SExpr::Type::String;
      for (;;) {
        if (pos_ >= t_.size()) throw ProtocolError("unterminated string in solver output", excerpt(t_, open));
        char d = t_[pos_++];
        if (d == '"') {
          if (pos_ < t_.size() && t_[pos_] == '"') {
            s.text += '"';
            ++pos_;
            continue;
          }
          return s;
        }
        s.text += d;
      }
    }
    if (c == '|') {
      std::size_t open = pos_++;
      auto end = t_.find('|', pos_);
      if (end == std::string_view::npos) throw ProtocolError("unterminated quoted symbol", excerpt(t_, open));
      SExpr a;
      a.text = std::string(t_.substr(pos_, end - pos_));
      pos_ = end + 1;
      return a;
    }
    std::size_t start = pos_;
    while (pos_ < t_.size()) {
      char d = t_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '"' || d == ';') break;
      ++pos_;
    }
    SExpr a;
    a.text = std::string(t_.substr(start, pos_ - start));
    return a;
  }

  std::string_view t_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) { return Reader(text).all(); }

std::size_t first_sexpr_end(std::string_view t) {
  constexpr auto npos = std::string_view::npos;
  int depth = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char c = t[i];
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == ';') {
      i = t.find('\n', i);
      if (i == npos) return npos;
      continue;
    }
    if (c == '"') {
      // "" is an escaped quote inside a string literal
      for (++i;; i += 2) {
        i = t.find('"', i);
        if (i == npos || i + 1 >= t.size()) return i == npos || depth > 0 ? npos : i + 1;
        if (t[i + 1] != '"') break;
      }
    } else if (c == '|') {
      i = t.find('|', i + 1);
      if (i == npos) return npos;
    } else if (c == '(') {
      ++depth;
      continue;
    } else if (c == ')') {
      --depth;
    } else {
      while (i < t.size() && !std::isspace(static_cast<unsigned char>(t[i])) && t[i] != '(' && t[i] != ')' &&
             t[i] != '"' && t[i] != '|' && t[i] != ';')
        ++i;
      if (i >= t.size()) return npos;
      --i;
    }
    if (depth <= 0) return i + 1;
  }
  return npos;
}

}  // namespace lexv
