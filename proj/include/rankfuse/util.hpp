// SPDX-License-Identifier: Apache-2.0
//
// Text helpers for exact floating-point round trips in file formats.
#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "rankfuse/types.hpp"

namespace rankfuse {

// Shortest decimal rendering that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ParseError("invalid number '" + std::string(text) + "'", line_no);
  }
  return v;
}

inline std::int64_t parse_int64(std::string_view text, std::size_t line_no) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("invalid integer '" + std::string(text) + "'", line_no);
  }
  return v;
}

}  // namespace rankfuse
