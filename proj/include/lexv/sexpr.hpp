#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lexv {

/// Minimal S-expression value for reading solver output.
struct SExpr {
  enum class Type { Atom, String, List };
  Type type = Type::Atom;
  std::string text;
  std::vector<SExpr> items;

  bool is_atom() const { return type == Type::Atom; }
  bool is_list() const { return type == Type::List; }
  bool is_atom(std::string_view s) const { return type == Type::Atom && text == s; }
  std::string to_string() const;
};

/// Reads every top-level expression in `text`. Throws ProtocolError on
/// unbalanced parentheses or unterminated literals.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// Length of the prefix holding the first complete top-level expression
/// (leading whitespace and comments included), or npos while the text is
/// still incomplete. An atom counts as complete once a delimiter follows it.
std::size_t first_sexpr_end(std::string_view text);

}  // namespace lexv
