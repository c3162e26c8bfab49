#pragma once

// Locale-independent number formatting for data outputs and reports.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace pvgrid::fmt {

namespace detail {
inline std::string strip_negative_zero(std::string s) {
  if (s.size() > 1 && s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}
}  // namespace detail

/// Shortest %g-style rendering with `digits` significant digits.
inline std::string sig(double x, int digits = 6) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general,
                                 digits);
  return detail::strip_negative_zero(std::string(buf.data(), res.ptr));
}

inline std::string fixed(double x, int decimals) {
  if (!std::isfinite(x)) return sig(x);
  std::array<char, 64> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed, decimals);
  return detail::strip_negative_zero(std::string(buf.data(), res.ptr));
}

/// Value with an SI prefix so the mantissa lies in [1, 1000), e.g. "1.40256 mH".
inline std::string engineering(double x, std::string_view unit, int digits = 6) {
  static constexpr std::array<std::string_view, 9> prefixes{"p", "n", "µ", "m", "",
                                                            "k", "M", "G", "T"};
  if (x == 0.0 || !std::isfinite(x)) return sig(x, digits) + " " + std::string(unit);
  int exp3 = static_cast<int>(std::floor(std::log10(std::abs(x)) / 3.0));
  exp3 = std::clamp(exp3, -4, 4);
  double mantissa = x / std::pow(1000.0, exp3);
  // Rounding to `digits` can push the mantissa to 1000.
  const std::string rounded = sig(mantissa, digits);
  double back = 0.0;
  std::from_chars(rounded.data(), rounded.data() + rounded.size(), back);
  if (std::abs(back) >= 1000.0 && exp3 < 4) {
    ++exp3;
    mantissa = x / std::pow(1000.0, exp3);
  }
  return sig(mantissa, digits) + " " + std::string(prefixes[exp3 + 4]) + std::string(unit);
}

}  // namespace pvgrid::fmt
