// Shortest round-trip double formatting for text dumps and serializers.
#pragma once

#include <charconv>
#include <string>

namespace ccopf::detail {

inline std::string fmt_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace ccopf::detail
