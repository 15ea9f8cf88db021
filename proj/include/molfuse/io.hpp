//
// Project molfuse - Copyright 2026 The molfuse Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "molfuse/common.hpp"

namespace molfuse {

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::kIoError, "cannot open file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Non-empty lines of a text file, trimmed. Lines starting with '#' are
// treated as comments.
inline std::vector<std::string> read_lines(const std::string &path,
                                           bool skip_comments = true) {
  std::ifstream in(path);
  if (!in) raise(Errc::kIoError, "cannot open file", path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (skip_comments && t[0] == '#') continue;
    lines.push_back(std::move(t));
  }
  return lines;
}

// Write-temp-then-rename so partially written files are never observed.
inline void atomic_write(const std::string &path, std::string_view content) {
  namespace fs = std::filesystem;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::kIoError, "cannot open file for writing", tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) raise(Errc::kIoError, "write failed", tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) raise(Errc::kIoError, "rename failed: " + ec.message(), path);
}

// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

} // namespace molfuse
