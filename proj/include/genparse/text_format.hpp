#pragma once

#include <charconv>
#include <istream>
#include <string>
#include <string_view>

#include "genparse/errors.hpp"

namespace genparse::text {

// Shortest representation that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw DataError("malformed number '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view s) {
  Int v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw DataError("malformed integer '" + std::string(s) + "'");
  }
  return v;
}

inline std::string read_line(std::istream& in, std::string_view what) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("unexpected end of file reading " + std::string(what));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Reads "<key> <value>" and returns the value.
inline std::string read_field(std::istream& in, std::string_view key) {
  const std::string line = read_line(in, key);
  if (line.size() <= key.size() || line.compare(0, key.size(), key) != 0 || line[key.size()] != ' ') {
    throw DataError("expected field '" + std::string(key) + "', got '" + line + "'");
  }
  return line.substr(key.size() + 1);
}

}  // namespace genparse::text
