#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace textmine::detail {

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_ascii_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return (u >= '!' && u <= '/') || (u >= ':' && u <= '@') ||
         (u >= '[' && u <= '`') || (u >= '{' && u <= '~');
}

inline bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

/// Byte length of the UTF-8 sequence starting with `first`. Invalid lead
/// bytes count as length 1 so iteration always makes progress.
inline std::size_t cp_length(unsigned char first) {
  if (first < 0x80) return 1;
  if ((first & 0xE0) == 0xC0) return 2;
  if ((first & 0xF0) == 0xE0) return 3;
  if ((first & 0xF8) == 0xF0) return 4;
  return 1;
}

/// Byte offsets of each code point start, plus the end offset as sentinel.
inline std::vector<std::size_t> cp_offsets(std::string_view s) {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    out.push_back(i);
    std::size_t n = cp_length(static_cast<unsigned char>(s[i]));
    i += (i + n <= s.size()) ? n : 1;
  }
  out.push_back(s.size());
  return out;
}

inline std::size_t cp_count(std::string_view s) {
  return cp_offsets(s).size() - 1;
}

/// Case folding over ASCII and the Latin-1 supplement (covers the corpus
/// languages: EN, DE, NL, FR). Other code points pass through unchanged.
/// Folding is byte-length preserving, so offsets into the original text
/// stay valid for folded surfaces.
inline std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0 >= 'A' && b0 <= 'Z' ? static_cast<char>(b0 + 0x20)
                                           : static_cast<char>(b0));
      ++i;
      continue;
    }
    if (b0 == 0xC3 && i + 1 < s.size()) {
      // U+00C0..U+00DE except U+00D7 (multiplication sign) fold by +0x20.
      auto b1 = static_cast<unsigned char>(s[i + 1]);
      std::uint32_t cp = 0xC0u + (b1 - 0x80u);
      if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) b1 += 0x20;
      out.push_back(static_cast<char>(b0));
      out.push_back(static_cast<char>(b1));
      i += 2;
      continue;
    }
    if (b0 == 0xC5 && i + 1 < s.size() &&
        static_cast<unsigned char>(s[i + 1]) == 0xB8) {
      // U+0178 LATIN CAPITAL Y WITH DIAERESIS -> U+00FF
      out.push_back(static_cast<char>(0xC3));
      out.push_back(static_cast<char>(0xBF));
      i += 2;
      continue;
    }
    std::size_t n = cp_length(b0);
    if (i + n > s.size()) n = 1;
    out.append(s.substr(i, n));
    i += n;
  }
  return out;
}

/// True when `s` is well-formed UTF-8; `bad` receives the first bad offset.
inline bool validate_utf8(std::string_view s, std::size_t* bad = nullptr) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t n;
    std::uint32_t cp;
    if (b0 < 0x80) {
      i += 1;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      n = 2;
      cp = b0 & 0x1Fu;
    } else if ((b0 & 0xF0) == 0xE0) {
      n = 3;
      cp = b0 & 0x0Fu;
    } else if ((b0 & 0xF8) == 0xF0) {
      n = 4;
      cp = b0 & 0x07u;
    } else {
      if (bad) *bad = i;
      return false;
    }
    if (i + n > s.size()) {
      if (bad) *bad = i;
      return false;
    }
    for (std::size_t k = 1; k < n; ++k) {
      auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        if (bad) *bad = i;
        return false;
      }
      cp = (cp << 6) | (b & 0x3Fu);
    }
    bool overlong = (n == 2 && cp < 0x80) || (n == 3 && cp < 0x800) ||
                    (n == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      if (bad) *bad = i;
      return false;
    }
    i += n;
  }
  return true;
}

}  // namespace textmine::detail
