#pragma once

// Locale-independent number formatting for CSV emission: floats carry
// 9 significant digits via to_chars.

#include <charconv>
#include <cstdint>
#include <string>

namespace stfresh {

inline std::string format_double(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return {buf, res.ptr};
}

inline std::string format_int(std::int64_t v) { return std::to_string(v); }

inline std::string format_u64(std::uint64_t v) { return std::to_string(v); }

}  // namespace stfresh
