#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace waist {

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

/// Strict full-string parse; throws std::invalid_argument on trailing junk.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace waist
