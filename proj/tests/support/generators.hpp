#pragma once

// Random (sentence, spans) cases for the annotation round-trip properties.

#include <random>
#include <string>
#include <vector>

#include "lexiforge/annotate/match.hpp"
#include "lexiforge/annotate/sentence.hpp"
#include "lexiforge/lexicon/lexicon.hpp"

namespace lexiforge::testgen {

struct SpanCase {
  annotate::Sentence sentence;
  std::vector<annotate::TermSpan> spans;
};

inline SpanCase random_span_case(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {
      "innovation", "design", "R&D", "client's", "<tag>", "café", "x&y", "Model", "3D", "état", "d'un",
      "state-of-the-art", "(beta)", "done.", "end,", "«quote»", "über", "naïve", "a<b", "'single'", "&lt",
      "data", "platform", "lab", "digital", "twin", "open", "smart", "green", "E=mc²"};
  static const std::vector<std::string> canon_pool = {
      "term-1 alpha", "term-2 o'brien", "term-3 a&b", "term-4 <x>", "term-5", "term-6 ünï", "term-7 'q'"};
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  std::string text;
  const std::size_t n_words = 1 + pick(18);
  for (std::size_t i = 0; i < n_words; ++i) {
    if (i) text += pick(5) == 0 ? "  " : " ";
    text += words[pick(words.size())];
  }
  SpanCase c;
  c.sentence = annotate::make_sentence(text, "doc", 0);
  const std::size_t n = c.sentence.size();

  std::size_t pos = 0;
  while (pos < n) {
    pos += pick(3);
    if (pos >= n) break;
    const std::size_t len = 1 + pick(std::min<std::size_t>(4, n - pos));
    annotate::TermSpan sp;
    sp.start = pos;
    sp.end = pos + len;
    sp.category = kAllCategories[pick(kAllCategories.size())];
    if (sp.category == Category::mac && len < 2) sp.category = Category::dig;
    if (sp.category == Category::mac) {
      sp.is_macro = true;
      sp.canonical = text::normalize_term(annotate::surface_text(c.sentence, sp.start, sp.end));
      const auto toks = lexicon::canonical_tokens(sp.canonical);
      const std::size_t k = 2 + pick(2);
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t b = pick(toks.size());
        const std::size_t e = b + 1 + pick(toks.size() - b);
        sp.constituents.push_back(text::join({toks.begin() + b, toks.begin() + e}, " "));
      }
    } else {
      sp.canonical = canon_pool[pick(canon_pool.size())];
    }
    c.spans.push_back(std::move(sp));
    pos += len;
  }
  return c;
}

}  // namespace lexiforge::testgen

namespace lexiforge::annotate {
inline void PrintTo(const TermSpan& s, std::ostream* os) {
  *os << "[" << s.start << "," << s.end << ") " << code(s.category) << " '" << s.canonical << "'";
  for (const auto& c : s.constituents) *os << " <" << c << ">";
}
}  // namespace lexiforge::annotate
