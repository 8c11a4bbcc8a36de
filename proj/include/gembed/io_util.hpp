#pragma once

// Small text I/O helpers shared by the file formats.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gembed/error.hpp"

namespace gembed {

// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

inline bool parse_double(std::string_view tok, double& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

inline bool parse_int64(std::string_view tok, std::int64_t& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

inline bool parse_uint64(std::string_view tok, std::uint64_t& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

inline double require_double(std::string_view tok, const std::string& where) {
  double v = 0.0;
  if (!parse_double(tok, v))
    throw ValidationError(where + ": bad number '" + std::string(tok) + "'");
  return v;
}

inline std::int64_t require_int64(std::string_view tok,
                                  const std::string& where) {
  std::int64_t v = 0;
  if (!parse_int64(tok, v))
    throw ValidationError(where + ": bad integer '" + std::string(tok) + "'");
  return v;
}

inline std::uint64_t require_uint64(std::string_view tok,
                                    const std::string& where) {
  std::uint64_t v = 0;
  if (!parse_uint64(tok, v))
    throw ValidationError(where + ": bad integer '" + std::string(tok) + "'");
  return v;
}

// Whitespace-delimited tokens; everything from '#' on is comment.
inline std::vector<std::string_view> tokenize_line(std::string_view line) {
  const std::size_t hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r' || line[i] == '\v'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r' && line[j] != '\v')
      ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open for reading: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  return out;
}

}  // namespace gembed
