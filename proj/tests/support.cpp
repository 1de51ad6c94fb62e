#include "support.hpp"

#include "lexv/generator.hpp"
#include "lexv/smtlib.hpp"
#include "lexv/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lexv::test {

namespace fs = std::filesystem;

fs::path fixture(const std::string& rel) {
  const char* dir = std::getenv("LEXV_FIXTURES");
  return fs::path(dir && *dir ? dir : LEXV_FIXTURES_DEFAULT) / rel;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const Solver& solver() {
  static const Solver s = Solver::connect(resolve_solver_config());
  return s;
}

ConstraintBundle fsc_bundle() { return load_bundle(fixture("fsc_case.json")); }

TempDir::TempDir() {
  std::random_device rd;
  for (;;) {
    path_ = fs::temp_directory_path() / ("lexv-test-" + std::to_string(rd()));
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path write_script(const fs::path& dir, const std::string& name, const std::string& body) {
  fs::path p = dir / name;
  {
    std::ofstream out(p);
    out << "#!/bin/sh\n" << body;
  }
  fs::permissions(p, fs::perms::owner_all, fs::perm_options::add);
  return p;
}

ScopedChecker::ScopedChecker(const ConstraintBundle& b)
    : b_(b), env_(b.sort_env()), proc_(solver().config()) {
  std::string head = "(set-option :produce-models true)\n(set-logic QF_LIRA)\n";
  for (const auto& v : b.vars) head += "(declare-fun " + v.name + " () " + std::string(sort_name(v.sort)) + ")\n";
  proc_.send(head);
}

bool ScopedChecker::sat(const std::vector<Expr>& formulas) {
  std::string cmd = "(push 1)\n";
  for (const auto& f : formulas) cmd += "(assert " + emit_expr(f, env_) + ")\n";
  proc_.send(cmd);
  ++checks_;
  SExpr st = proc_.ask("(check-sat)");
  proc_.send("(pop 1)\n");
  if (st.is_atom("sat")) return true;
  if (st.is_atom("unsat")) return false;
  throw std::runtime_error("oracle check returned " + st.to_string());
}

std::optional<Assignment> ScopedChecker::model(const std::vector<Expr>& formulas) {
  std::string cmd = "(push 1)\n";
  for (const auto& f : formulas) cmd += "(assert " + emit_expr(f, env_) + ")\n";
  proc_.send(cmd);
  ++checks_;
  SExpr st = proc_.ask("(check-sat)");
  std::optional<Assignment> out;
  if (st.is_atom("sat")) {
    std::string q = "(get-value (";
    for (const auto& v : b_.vars) q += " " + v.name;
    SExpr vals = proc_.ask(q + "))");
    Assignment a;
    for (std::size_t i = 0; i < b_.vars.size(); ++i)
      a.insert_or_assign(b_.vars[i].name, parse_model_value(vals.items.at(i).items.at(1), b_.vars[i].sort));
    out = std::move(a);
  } else if (!st.is_atom("unsat")) {
    throw std::runtime_error("oracle check returned " + st.to_string());
  }
  proc_.send("(pop 1)\n");
  return out;
}

long brute_force_min_cost(const ConstraintBundle& b, const std::map<std::string, long>& weights, int* checks) {
  std::vector<const Constraint*> soft;
  std::vector<Expr> base;
  for (const auto& c : b.constraints) {
    if (c.soft()) soft.push_back(&c);
    else base.push_back(c.expr);
  }
  base.push_back(penalty_free(b));
  if (soft.size() > 20) throw std::runtime_error("brute force limited to 20 soft constraints");

  const std::size_t n = soft.size();
  std::vector<long> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = weights.at(soft[i]->id);
  std::vector<std::uint32_t> masks(std::size_t{1} << n);  // bit set = dropped
  for (std::uint32_t m = 0; m < masks.size(); ++m) masks[m] = m;
  auto dropped = [&](std::uint32_t m) {
    long s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1) s += w[i];
    return s;
  };
  std::stable_sort(masks.begin(), masks.end(),
                   [&](std::uint32_t a, std::uint32_t c) { return dropped(a) < dropped(c); });

  ScopedChecker oracle(b);
  std::vector<std::uint32_t> unsat_kept;  // kept-sets known to be unsatisfiable
  const std::uint32_t all = static_cast<std::uint32_t>(masks.size() - 1);
  long result = -1;
  for (std::uint32_t m : masks) {
    const std::uint32_t kept = all & ~m;
    bool pruned = std::any_of(unsat_kept.begin(), unsat_kept.end(),
                              [&](std::uint32_t u) { return (u & kept) == u; });
    if (pruned) continue;
    std::vector<Expr> f = base;
    for (std::size_t i = 0; i < n; ++i)
      if (kept >> i & 1) f.push_back(soft[i]->expr);
    if (oracle.sat(f)) {
      result = dropped(m);
      break;
    }
    unsat_kept.push_back(kept);
  }
  if (checks) *checks = oracle.checks();
  return result;
}

std::vector<std::set<std::string>> brute_force_muses(const ConstraintBundle& b) {
  std::vector<std::pair<std::string, Expr>> elems;
  for (const auto& c : b.constraints) elems.emplace_back(c.id, c.expr);
  elems.emplace_back(std::string(kPinName), penalty_free(b));
  const std::size_t n = elems.size();
  if (n > 16) throw std::runtime_error("brute force limited to 16 elements");

  ScopedChecker oracle(b);
  std::vector<char> sat(std::size_t{1} << n);
  for (std::uint32_t m = 0; m < sat.size(); ++m) {
    std::vector<Expr> f;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1) f.push_back(elems[i].second);
    sat[m] = oracle.sat(f) ? 1 : 0;
  }
  std::vector<std::set<std::string>> out;
  for (std::uint32_t m = 0; m < sat.size(); ++m) {
    if (sat[m]) continue;
    bool minimal = true;
    for (std::size_t i = 0; i < n && minimal; ++i)
      if ((m >> i & 1) && !sat[m & ~(1u << i)]) minimal = false;
    if (!minimal) continue;
    std::set<std::string> s;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1) s.insert(elems[i].first);
    out.push_back(std::move(s));
  }
  return out;
}

std::set<std::string> brute_force_term_union(const ConstraintBundle& b) {
  std::set<std::string> out;
  for (const auto& mus : brute_force_muses(b))
    for (const auto& id : mus) {
      const Constraint* c = b.find_constraint(id);
      if (c && c->hard()) out.insert(id);
    }
  return out;
}

int reference_capital_level(const Rational& r, const Rational& net_worth) {
  if (r < 50 || net_worth < 0) return 4;
  if (r < 150) return 3;
  if (r < 200) return 2;
  return 1;
}

namespace {

std::string strip_ws(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (s.compare(i, 3, "　") == 0) {
      i += 3;
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(s[i]))) out += s[i];
    ++i;
  }
  return out;
}

const std::vector<std::string> kEnWords = {"insurer", "capital",  "shall",   "ratio",    "measure", "order",
                                           "plan",    "authority", "restrict", "receiver", "asset",   "not"};
// No numeral characters, no article or heading markers.
const std::vector<std::string> kZhChars = {"保", "險", "業", "資", "本", "比", "率", "不", "得", "低", "於",
                                           "主", "管", "機", "關", "應", "依", "規", "定", "採", "取", "措",
                                           "施", "命", "其", "提", "出", "增", "計", "畫", "解", "除", "負"};
const char* const kZhDigits[] = {"零", "一", "二", "三", "四", "五", "六", "七", "八", "九"};

std::string zh_positional(long n) {
  std::string out;
  const long h = n / 100, t = n / 10 % 10, u = n % 10;
  if (h) out += std::string(kZhDigits[h]) + "百";
  if (t) out += (t == 1 && !h ? std::string() : std::string(kZhDigits[t])) + "十";
  else if (h && u) out += "零";
  if (u) out += kZhDigits[u];
  return out;
}

std::string zh_numeral(Rng& rng, long n) {
  const std::string digits = std::to_string(n);
  switch (rng.uniform_int(0, 3)) {
    case 0: return digits;
    case 1: {
      std::string out;
      for (char c : digits) out += encode_utf8(U'０' + static_cast<char32_t>(c - '0'));
      return out;
    }
    case 2:
      if (digits.find('0') == std::string::npos) {
        std::string out;
        for (char c : digits) out += kZhDigits[c - '0'];
        return out;
      }
      [[fallthrough]];
    default: return zh_positional(n);
  }
}

std::string spaces(Rng& rng, bool zh) {
  if (zh && rng.chance(0.3)) return "　";
  return std::string(static_cast<std::size_t>(rng.uniform_int(1, 3)), ' ');
}

}  // namespace

FuzzDoc fuzz_document(std::uint64_t seed, bool zh) {
  Rng rng(seed);
  FuzzDoc d;
  std::vector<std::string> lines;
  auto words = [&](long lo, long hi) {
    std::string out;
    const long n = rng.uniform_int(lo, hi);
    for (long i = 0; i < n; ++i) {
      if (zh) out += kZhChars[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(kZhChars.size()) - 1))];
      else out += (i ? spaces(rng, false) : "") + kEnWords[static_cast<std::size_t>(rng.uniform_int(0, 11))];
    }
    return out;
  };
  auto maybe_heading = [&] {
    if (!rng.chance(0.15)) return;
    if (zh) lines.push_back("第" + zh_numeral(rng, rng.uniform_int(1, 20)) + "章" + spaces(rng, true) + words(1, 4));
    else lines.push_back((rng.chance(0.5) ? "Chapter " : "Section ") + std::to_string(rng.uniform_int(1, 12)) + " " + words(1, 3));
  };

  for (long i = rng.uniform_int(0, 3); i > 0; --i) lines.push_back(zh ? words(2, 6) : "PREAMBLE " + words(1, 4));

  std::set<std::string> used;
  const long articles = rng.uniform_int(1, 6);
  for (long a = 0; a < articles; ++a) {
    long main = 0, sub = 0;
    std::string key;
    do {
      main = rng.uniform_int(1, 999);
      sub = rng.chance(0.4) ? rng.uniform_int(1, 9) : 0;
      key = std::to_string(main) + (sub ? "-" + std::to_string(sub) : "");
    } while (!used.insert(key).second);
    d.keys.push_back(key);

    std::string title = rng.chance(0.6) ? words(1, 4) : "";
    std::string header;
    if (zh) {
      header = "第" + zh_numeral(rng, main) + "條" + (sub ? "之" + zh_numeral(rng, sub) : "");
      if (!title.empty()) header += spaces(rng, true) + title;
    } else {
      header = "Article" + spaces(rng, false) + key;
      if (!title.empty()) header += spaces(rng, false) + title;
      title = normalize_line(title);
    }
    d.titles.push_back(title);
    lines.push_back((rng.chance(0.3) ? spaces(rng, zh) : "") + header);

    for (long i = rng.uniform_int(0, 2); i > 0; --i) {
      maybe_heading();
      std::string l = words(2, 8);
      d.body += strip_ws(l);
      lines.push_back(l + (rng.chance(0.2) ? spaces(rng, zh) : ""));
    }
    const long clauses = rng.uniform_int(0, 3);
    for (long c = 1; c <= clauses; ++c) {
      maybe_heading();
      std::string l = zh ? zh_positional(c) + "、" + words(2, 8)
                         : (rng.chance(0.5) ? std::to_string(c) + "." : "(" + std::to_string(c) + ")") + " " + words(2, 6);
      d.body += strip_ws(l);
      lines.push_back(l);
      for (long k = rng.uniform_int(0, 2); k > 0; --k) {
        std::string cont = words(1, 5);
        d.body += strip_ws(cont);
        lines.push_back(cont);
      }
    }
    if (rng.chance(0.2)) lines.push_back("");
  }
  for (const auto& l : lines) d.text += l + (rng.chance(0.1) ? "\r\n" : "\n");
  return d;
}

std::string article_body(const ArticleMap& m) {
  std::string out;
  for (const auto& key : m.order) {
    const Article& a = m.at(key);
    out += strip_ws(a.content);
    for (const auto& c : a.clauses) out += strip_ws(c);
  }
  return out;
}

}  // namespace lexv::test
