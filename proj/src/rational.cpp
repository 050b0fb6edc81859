#include "searchlight/rational.hpp"

#include <algorithm>
#include <cctype>

namespace searchlight {

namespace {

std::optional<BigInt> parse_bigint(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c);
      })) {
    return std::nullopt;
  }
  BigInt value{std::string(s)};
  return negative ? BigInt(-value) : value;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  auto num = parse_bigint(text.substr(0, slash));
  if (!num) return std::nullopt;
  if (slash == std::string_view::npos) return Rational(*num);
  auto den = parse_bigint(text.substr(slash + 1));
  if (!den || *den == 0) return std::nullopt;
  if (*den < 0) {
    *num = -*num;
    *den = -*den;
  }
  return Rational(*num, *den);
}

std::string format_rational(const Rational& value) {
  std::string out = numerator(value).str();
  if (denominator(value) != 1) {
    out += '/';
    out += denominator(value).str();
  }
  return out;
}

double approx(const Rational& value) { return value.convert_to<double>(); }

std::size_t rational_bits(const Rational& value) {
  auto bits = [](const BigInt& n) -> std::size_t {
    if (n == 0) return 1;
    return boost::multiprecision::msb(boost::multiprecision::abs(n)) + 1;
  };
  return std::max(bits(numerator(value)), bits(denominator(value)));
}

Rational midpoint(const Rational& a, const Rational& b) { return (a + b) / 2; }

}  // namespace searchlight
