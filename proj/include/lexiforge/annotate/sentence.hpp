#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lexiforge/annotate/tokenize.hpp"
#include "lexiforge/text.hpp"

namespace lexiforge::annotate {

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::size_t begin = 0;  // byte offset of `text` within its source passage
  std::string text;
  std::vector<std::string> tokens;
  std::vector<Offset> offsets;  // relative to `text`

  std::size_t size() const { return tokens.size(); }
};

inline Sentence make_sentence(std::string text, std::string doc_id = {}, std::size_t index = 0,
                              std::size_t begin = 0) {
  Sentence s;
  s.doc_id = std::move(doc_id);
  s.index = index;
  s.begin = begin;
  auto toks = tokenize(text);
  s.text = std::move(text);
  s.tokens = std::move(toks.tokens);
  s.offsets = std::move(toks.offsets);
  return s;
}

using Abbreviations = std::set<std::string, std::less<>>;

inline const Abbreviations& default_abbreviations() {
  static const Abbreviations list = {
      "etc.", "Inc.", "e.g.", "i.e.", "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "Ltd.", "Co.", "Corp.",
      "vs.", "St.", "No.", "Fig.", "U.S.", "approx.", "Jr.", "Sr.", "cf.", "al.", "Dept.", "Jan.",
      "Feb.", "Mar.", "Apr.", "Aug.", "Sept.", "Oct.", "Nov.", "Dec."};
  return list;
}

namespace detail {

inline bool is_terminator(UChar32 c) { return c == '.' || c == '!' || c == '?'; }

inline bool is_closer(UChar32 c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == 0x00BB || c == 0x201D || c == 0x2019;
}

}  // namespace detail

// Rule-based segmentation: a run of . ! ? (plus closing quotes/brackets)
// ends a sentence when followed by whitespace and an uppercase letter or a
// digit, unless the word ending in '.' is a listed abbreviation.
inline std::vector<Sentence> split_sentences(std::string_view source, std::string_view doc_id = {},
                                             const Abbreviations& abbreviations = default_abbreviations(),
                                             std::size_t first_index = 0) {
  std::vector<Sentence> out;
  const auto cps = text::code_points(source);
  std::size_t start = 0;  // code point index where the pending sentence may begin

  auto push = [&](std::size_t lo, std::size_t hi) {
    while (lo < hi && text::is_space(cps[lo].value)) ++lo;
    while (hi > lo && text::is_space(cps[hi - 1].value)) --hi;
    if (lo == hi) return;
    const std::size_t b = cps[lo].begin;
    const std::size_t e = cps[hi - 1].end;
    out.push_back(make_sentence(std::string(source.substr(b, e - b)), std::string(doc_id),
                                first_index + out.size(), b));
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    if (!detail::is_terminator(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && detail::is_terminator(cps[j].value)) ++j;
    while (j < cps.size() && detail::is_closer(cps[j].value)) ++j;
    std::size_t k = j;
    while (k < cps.size() && text::is_space(cps[k].value)) ++k;
    const bool has_space = k > j;
    const bool next_starts = k < cps.size() && (text::is_upper(cps[k].value) || text::is_digit(cps[k].value));
    if (!has_space || !next_starts) {
      i = j;
      continue;
    }
    if (cps[i].value == '.' && j == i + 1) {
      std::size_t w = i;
      while (w > start && !text::is_space(cps[w - 1].value)) --w;
      while (w < i && !text::is_alnum(cps[w].value)) ++w;
      const std::string_view word = source.substr(cps[w].begin, cps[i].end - cps[w].begin);
      if (abbreviations.count(word)) {
        i = j;
        continue;
      }
    }
    push(start, j);
    start = j;
    i = k;
  }
  push(start, cps.size());
  return out;
}

}  // namespace lexiforge::annotate
