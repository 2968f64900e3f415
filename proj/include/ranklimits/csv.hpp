#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace ranklimits {

// All simulation output goes through these helpers so that every writer
// agrees on the numeric format: shortest-round-trip-ish "%.10g" for doubles,
// plain decimal for integers, comma separators, '\n' line endings.
inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string format_value(int v) { return std::to_string(v); }
inline std::string format_value(long v) { return std::to_string(v); }
inline std::string format_value(long long v) { return std::to_string(v); }
inline std::string format_value(unsigned long long v) { return std::to_string(v); }
inline std::string format_value(const std::string& v) { return v; }
inline std::string format_value(const char* v) { return v; }

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

}  // namespace ranklimits
