#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace lexv {

// Expression templates off: values are used with ?:, auto and lambdas.
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

/// Parses "111.09", "-2.5", "42", "1/3", "1e3" into an exact rational.
std::optional<Rational> parse_decimal(std::string_view text);

/// Shortest exact rendering: plain decimal when the denominator divides a
/// power of ten, "p/q" otherwise. parse_decimal(to_decimal(q)) == q.
std::string to_decimal(const Rational& q);

bool is_integral(const Rational& q);

}  // namespace lexv
