#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crsig/errors.hpp"

namespace crsig {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) {
    throw ConfigError("invalid " + std::string(what) + ": '" + std::string(s) +
                      "'");
  }
  return v;
}

/// One `key = value` entry, with its 1-based source line for diagnostics.
struct KvEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Line-oriented `key = value` text. `#` starts a comment; blank lines are
/// skipped; keys may repeat and keep their order.
inline std::vector<KvEntry> parse_kv(std::string_view text) {
  std::vector<KvEntry> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    KvEntry e{std::string(trim(line.substr(0, eq))),
              std::string(trim(line.substr(eq + 1))), line_no};
    if (e.key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    out.push_back(std::move(e));
  }
  return out;
}

/// Value of a key that must appear exactly once.
inline const std::string& kv_require(const std::vector<KvEntry>& entries,
                                     std::string_view key) {
  const std::string* found = nullptr;
  for (const auto& e : entries) {
    if (e.key != key) continue;
    if (found) throw ConfigError("duplicate key '" + std::string(key) + "'");
    found = &e.value;
  }
  if (!found) throw ConfigError("missing key '" + std::string(key) + "'");
  return *found;
}

}  // namespace crsig
