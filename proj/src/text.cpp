// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/text.hpp"

namespace infominer {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Returns the sequence length for a lead byte, 0 if it cannot start one.
int sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if (lead >= 0xC2 && lead <= 0xDF) return 2;
  if (lead >= 0xE0 && lead <= 0xEF) return 3;
  if (lead >= 0xF0 && lead <= 0xF4) return 4;
  return 0;
}

// Returns 0xFFFFFFFF for an ill-formed sequence.
char32_t decode(std::string_view s, std::size_t pos, int& len) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  len = sequence_length(lead);
  if (len == 0 || pos + static_cast<std::size_t>(len) > s.size()) return 0xFFFFFFFF;
  if (len == 1) return lead;
  char32_t cp = lead & (0x7F >> len);
  for (int i = 1; i < len; ++i) {
    const auto c = static_cast<unsigned char>(s[pos + i]);
    if ((c & 0xC0) != 0x80) return 0xFFFFFFFF;
    cp = (cp << 6) | (c & 0x3F);
  }
  // Overlongs, surrogates and out-of-range values.
  if ((len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    return 0xFFFFFFFF;
  }
  return cp;
}

}  // namespace

bool is_valid_utf8(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    int len = 0;
    if (decode(s, pos, len) == 0xFFFFFFFF) return false;
    pos += static_cast<std::size_t>(len);
  }
  return true;
}

char32_t next_code_point(std::string_view s, std::size_t& pos) {
  int len = 0;
  const char32_t cp = decode(s, pos, len);
  if (cp == 0xFFFFFFFF) {
    ++pos;
    return kReplacement;
  }
  pos += static_cast<std::size_t>(len);
  return cp;
}

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::string_view trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end) {
    std::size_t next = begin;
    if (!is_unicode_space(next_code_point(s, next))) break;
    begin = next;
  }
  // Scan forward remembering the end of the last non-space code point.
  std::size_t pos = begin;
  std::size_t last = begin;
  while (pos < end) {
    const char32_t cp = next_code_point(s, pos);
    if (!is_unicode_space(cp)) last = pos;
  }
  return s.substr(begin, last - begin);
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < s.size()) {
    const std::size_t at = pos;
    const char32_t cp = next_code_point(s, pos);
    if (is_unicode_space(cp)) {
      if (start != std::string_view::npos) {
        out.push_back(s.substr(start, at - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = at;
    }
  }
  if (start != std::string_view::npos) out.push_back(s.substr(start));
  return out;
}

}  // namespace infominer
