#pragma once

// IOB1 labels: tokens inside a term are I-XXX; B-XXX appears only on the
// first token of a term that directly follows another term of the same
// category.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexiforge/annotate/match.hpp"
#include "lexiforge/category.hpp"
#include "lexiforge/error.hpp"

namespace lexiforge::annotate {

enum class BioTag { O, I, B };

struct BioLabel {
  BioTag tag = BioTag::O;
  Category category = Category::inn;  // ignored when tag == O

  static BioLabel outside() { return {}; }
  static BioLabel inside(Category c) { return {BioTag::I, c}; }
  static BioLabel begin(Category c) { return {BioTag::B, c}; }

  bool operator==(const BioLabel& o) const {
    return tag == o.tag && (tag == BioTag::O || category == o.category);
  }
};

inline std::string to_string(const BioLabel& l) {
  switch (l.tag) {
    case BioTag::O: return "O";
    case BioTag::I: return "I-" + std::string(code(l.category));
    case BioTag::B: return "B-" + std::string(code(l.category));
  }
  return "O";
}

inline std::optional<BioLabel> parse_bio_label(std::string_view s) {
  if (s == "O") return BioLabel::outside();
  if (s.size() < 3 || s[1] != '-' || (s[0] != 'I' && s[0] != 'B')) return std::nullopt;
  auto cat = category_from_code(s.substr(2));
  if (!cat) return std::nullopt;
  return BioLabel{s[0] == 'I' ? BioTag::I : BioTag::B, *cat};
}

inline std::vector<BioLabel> to_bio(std::size_t token_count, const std::vector<TermSpan>& spans) {
  std::vector<BioLabel> labels(token_count);
  std::vector<bool> covered(token_count, false);
  std::optional<TermSpan> previous;
  std::vector<TermSpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end(), [](const TermSpan& a, const TermSpan& b) { return a.start < b.start; });
  for (const auto& sp : sorted) {
    if (sp.start >= sp.end || sp.end > token_count) {
      throw Error(ErrorCode::malformed, "span [" + std::to_string(sp.start) + "," + std::to_string(sp.end) +
                                            ") out of range");
    }
    for (std::size_t t = sp.start; t < sp.end; ++t) {
      if (covered[t]) throw Error(ErrorCode::overlapping_spans, "token " + std::to_string(t) + " covered twice");
      covered[t] = true;
      labels[t] = BioLabel::inside(sp.category);
    }
    if (previous && previous->end == sp.start && previous->category == sp.category) {
      labels[sp.start] = BioLabel::begin(sp.category);
    }
    previous = sp;
  }
  return labels;
}

inline std::vector<BioLabel> to_bio(const Sentence& s, const std::vector<TermSpan>& spans) {
  return to_bio(s.size(), spans);
}

// Inverse of to_bio. Spans carry position and category only; an I-XXX after a
// different category (or O) opens a new span, as does any B-XXX.
inline std::vector<TermSpan> from_bio(const std::vector<BioLabel>& labels) {
  std::vector<TermSpan> spans;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const auto& l = labels[t];
    if (l.tag == BioTag::O) continue;
    const bool continues = l.tag == BioTag::I && !spans.empty() && spans.back().end == t &&
                           spans.back().category == l.category;
    if (continues) {
      spans.back().end = t + 1;
    } else {
      TermSpan sp;
      sp.start = t;
      sp.end = t + 1;
      sp.category = l.category;
      sp.is_macro = l.category == Category::mac;
      spans.push_back(sp);
    }
  }
  return spans;
}

}  // namespace lexiforge::annotate
