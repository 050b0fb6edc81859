#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace searchlight {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "p", "-p", or "p/q". Rejects empty input, zero denominators, and
// trailing junk. The result is normalized (lowest terms, positive denominator).
std::optional<Rational> parse_rational(std::string_view text);

// Renders as "p" or "p/q" in lowest terms; inverse of parse_rational.
std::string format_rational(const Rational& value);

double approx(const Rational& value);

// Largest bit length among |numerator| and denominator; bits(0) == 1.
std::size_t rational_bits(const Rational& value);

Rational midpoint(const Rational& a, const Rational& b);

}  // namespace searchlight
