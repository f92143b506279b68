#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

#include "melic/error.hpp"

namespace melic {

/// Exact time value in quarter-note units.
using Rational = boost::rational<std::int64_t>;

/// Parses "p/q" or "p". Throws ValidationError on anything else.
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view part) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw ValidationError("invalid rational \"" + std::string(text) + "\"");
    }
    return value;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  const std::int64_t den = parse_int(text.substr(slash + 1));
  if (den == 0) throw ValidationError("zero denominator in \"" + std::string(text) + "\"");
  return Rational(parse_int(text.substr(0, slash)), den);
}

/// Always "p/q" in lowest terms, e.g. "3/2", "1/1".
inline std::string format_rational(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace melic
