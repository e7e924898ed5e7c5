#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexiforge/annotate/sentence.hpp"
#include "lexiforge/category.hpp"
#include "lexiforge/lexicon/lexicon.hpp"
#include "lexiforge/text.hpp"

namespace lexiforge::annotate {

struct TermSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  Category category = Category::inn;
  std::string canonical;
  bool is_macro = false;
  std::vector<std::string> constituents;  // macro spans only, in start order

  std::size_t length() const { return end - start; }
  bool operator==(const TermSpan&) const = default;
};

inline std::string surface_text(const Sentence& s, std::size_t start, std::size_t end) {
  const auto b = s.offsets[start].first;
  const auto e = s.offsets[end - 1].second;
  return s.text.substr(b, e - b);
}

// Longest-match lexicon lookup over normalized tokens. Spans index the
// original tokens.
class TermMatcher {
 public:
  explicit TermMatcher(const lexicon::Lexicon& lex, const text::LemmaTable* lemmas = nullptr) : lemmas_(lemmas) {
    for (const auto& [canonical, term] : lex.by_canonical()) {
      Entry e{lexicon::canonical_tokens(canonical), canonical, term.category};
      if (e.tokens.empty()) continue;
      index_[e.tokens.front()].push_back(std::move(e));
    }
  }

  std::vector<TermSpan> match(const Sentence& s) const {
    std::vector<std::string> norm;
    norm.reserve(s.tokens.size());
    for (const auto& t : s.tokens) norm.push_back(text::normalize_term(t, lemmas_));

    struct Hit {
      std::size_t start, end;
      const Entry* entry;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < norm.size(); ++i) {
      auto it = index_.find(norm[i]);
      if (it == index_.end()) continue;
      for (const auto& e : it->second) {
        const std::size_t n = e.tokens.size();
        if (i + n > norm.size()) continue;
        if (std::equal(e.tokens.begin(), e.tokens.end(), norm.begin() + static_cast<std::ptrdiff_t>(i))) {
          hits.push_back({i, i + n, &e});
        }
      }
    }

    // Drop hits strictly inside another hit; keep one hit per identical range.
    std::vector<Hit> kept;
    for (const auto& h : hits) {
      bool covered = false;
      for (const auto& o : hits) {
        const bool contains = o.start <= h.start && h.end <= o.end;
        const bool strict = contains && (o.end - o.start) > (h.end - h.start);
        const bool same_range_earlier =
            o.start == h.start && o.end == h.end && o.entry->canonical < h.entry->canonical;
        if (strict || same_range_earlier) {
          covered = true;
          break;
        }
      }
      if (!covered) kept.push_back(h);
    }
    std::sort(kept.begin(), kept.end(), [](const Hit& a, const Hit& b) {
      return a.start != b.start ? a.start < b.start : a.end < b.end;
    });

    // Partially overlapping chains coalesce into one macro span.
    std::vector<TermSpan> spans;
    for (std::size_t i = 0; i < kept.size();) {
      std::size_t j = i + 1;
      std::size_t end = kept[i].end;
      while (j < kept.size() && kept[j].start < end) {
        end = std::max(end, kept[j].end);
        ++j;
      }
      TermSpan span;
      span.start = kept[i].start;
      span.end = end;
      if (j - i == 1) {
        span.category = kept[i].entry->category;
        span.canonical = kept[i].entry->canonical;
      } else {
        span.category = Category::mac;
        span.is_macro = true;
        span.canonical = text::normalize_term(surface_text(s, span.start, span.end), lemmas_);
        for (std::size_t k = i; k < j; ++k) span.constituents.push_back(kept[k].entry->canonical);
      }
      spans.push_back(std::move(span));
      i = j;
    }
    return spans;
  }

 private:
  struct Entry {
    std::vector<std::string> tokens;
    std::string canonical;
    Category category;
  };
  std::unordered_map<std::string, std::vector<Entry>> index_;
  const text::LemmaTable* lemmas_;
};

inline std::vector<TermSpan> match_terms(const Sentence& s, const lexicon::Lexicon& lex,
                                         const text::LemmaTable* lemmas = nullptr) {
  return TermMatcher(lex, lemmas).match(s);
}

}  // namespace lexiforge::annotate
