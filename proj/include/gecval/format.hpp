#ifndef GECVAL_FORMAT_HPP
#define GECVAL_FORMAT_HPP

#include <cmath>
#include <cstdint>
#include <string>

namespace gecval {

// Fixed-point decimal with round-half-up, locale-independent. All report
// numbers go through here so reruns and machines agree byte-for-byte.
inline std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  bool negative = value < 0;
  double magnitude = negative ? -value : value;
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  // The 1e-9 nudge keeps values that are exactly .5 in decimal but land a
  // hair under it in binary (e.g. 0.565 -> 56.499999...) rounding up.
  auto scaled = static_cast<std::int64_t>(magnitude * static_cast<double>(scale) + 0.5 + 1e-9);
  std::string digits = std::to_string(scaled);
  if (decimals == 0) return (negative && scaled != 0 ? "-" : "") + digits;
  if (digits.size() <= static_cast<std::size_t>(decimals))
    digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
  digits.insert(digits.size() - static_cast<std::size_t>(decimals), 1, '.');
  return (negative && scaled != 0 ? "-" : "") + digits;
}

// Scores are reported x100 with two decimals, matching the usual tables.
inline std::string format_score(double unit_value) {
  return format_fixed(unit_value * 100.0, 2);
}

}  // namespace gecval

#endif  // GECVAL_FORMAT_HPP
