#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexiforge/text.hpp"

namespace lexiforge::annotate {

using Offset = std::pair<std::size_t, std::size_t>;  // [begin, end) in bytes

struct Tokens {
  std::vector<std::string> tokens;
  std::vector<Offset> offsets;
};

namespace detail {

inline bool is_leading_punct(UChar32 c) {
  switch (c) {
    case '(': case '[': case '{': case '"': case '\'': case '<':
    case 0x00AB: case 0x201C: case 0x2018: case 0x00BF: case 0x00A1:
      return true;
    default:
      return false;
  }
}

inline bool is_trailing_punct(UChar32 c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?': case ')': case ']': case '}':
    case '"': case '\'': case '>':
    case 0x00BB: case 0x201D: case 0x2019: case 0x2026:
      return true;
    default:
      return false;
  }
}

}  // namespace detail

// Whitespace split, then leading/trailing punctuation peeled off one
// character per token. Internal hyphens and apostrophes stay in the word.
inline Tokens tokenize(std::string_view s) {
  Tokens out;
  const auto cps = text::code_points(s);
  std::size_t i = 0;
  auto emit = [&](std::size_t b, std::size_t e) {
    out.tokens.emplace_back(s.substr(b, e - b));
    out.offsets.emplace_back(b, e);
  };
  while (i < cps.size()) {
    while (i < cps.size() && text::is_space(cps[i].value)) ++i;
    std::size_t j = i;
    while (j < cps.size() && !text::is_space(cps[j].value)) ++j;
    if (j == i) break;

    std::size_t lo = i, hi = j;
    while (lo < hi && detail::is_leading_punct(cps[lo].value)) {
      emit(cps[lo].begin, cps[lo].end);
      ++lo;
    }
    std::size_t trail = hi;
    while (trail > lo && detail::is_trailing_punct(cps[trail - 1].value)) --trail;
    if (trail > lo) emit(cps[lo].begin, cps[trail - 1].end);
    for (std::size_t k = trail; k < hi; ++k) emit(cps[k].begin, cps[k].end);
    i = j;
  }
  return out;
}

inline bool is_punctuation_token(std::string_view tok) {
  for (const auto& cp : text::code_points(tok)) {
    if (text::is_alnum(cp.value)) return false;
  }
  return true;
}

}  // namespace lexiforge::annotate
