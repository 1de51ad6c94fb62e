#include "lexv/rational.hpp"

#include <cctype>

namespace lexv {

namespace {

std::optional<BigInt> parse_digits(std::string_view s) {
  if (s.empty()) return std::nullopt;
  BigInt v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

BigInt pow10(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 0; i < n; ++i) r *= 10;
  return r;
}

}  // namespace

std::optional<Rational> parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = parse_digits(s.substr(0, slash));
    auto den = parse_digits(s.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    Rational q(*num, *den);
    return neg ? Rational(-q) : q;
  }

  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp = s.substr(e + 1);
    bool eneg = false;
    if (!exp.empty() && (exp.front() == '-' || exp.front() == '+')) {
      eneg = exp.front() == '-';
      exp.remove_prefix(1);
    }
    auto ev = parse_digits(exp);
    if (!ev || *ev > 4000) return std::nullopt;
    exponent = static_cast<long>(*ev) * (eneg ? -1 : 1);
    s = s.substr(0, e);
  }

  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  std::string digits(int_part);
  digits += frac_part;
  auto mant = parse_digits(digits);
  if (!mant) return std::nullopt;
  exponent -= static_cast<long>(frac_part.size());

  Rational q = exponent >= 0 ? Rational(*mant * pow10(static_cast<unsigned>(exponent)))
                             : Rational(*mant, pow10(static_cast<unsigned>(-exponent)));
  return neg ? Rational(-q) : q;
}

bool is_integral(const Rational& q) { return denominator(q) == 1; }

std::string to_decimal(const Rational& q) {
  BigInt num = numerator(q);
  BigInt den = denominator(q);
  bool neg = num < 0;
  if (neg) num = -num;

  // den = 2^a 5^b is required for a terminating expansion.
  BigInt rest = den;
  unsigned twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) {
    return (neg ? "-" : "") + num.str() + "/" + den.str();
  }
  unsigned places = std::max(twos, fives);
  BigInt scaled = num * pow10(places) / den;
  std::string s = scaled.str();
  if (places > 0) {
    if (s.size() <= places) s.insert(0, places - s.size() + 1, '0');
    s.insert(s.size() - places, ".");
  }
  return (neg ? "-" : "") + s;
}

}  // namespace lexv
