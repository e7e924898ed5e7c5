#pragma once

// Micro-averaged precision / recall / F1 at token and entity level.

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "lexiforge/annotate/bio.hpp"
#include "lexiforge/error.hpp"

namespace lexiforge::eval {

using annotate::BioLabel;
using annotate::BioTag;

enum class Level { token, entity };

inline std::string_view to_string(Level l) { return l == Level::token ? "token" : "entity"; }

struct Counts {
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  Counts& operator+=(const Counts& o) {
    correct += o.correct;
    predicted += o.predicted;
    gold += o.gold;
    return *this;
  }
};

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

inline double f1_score(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

inline Prf prf(const Counts& c) {
  Prf m;
  m.precision = c.predicted ? static_cast<double>(c.correct) / static_cast<double>(c.predicted) : 0.0;
  m.recall = c.gold ? static_cast<double>(c.correct) / static_cast<double>(c.gold) : 0.0;
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

// Variant that scores macro-term labels as O.
inline BioLabel drop_mac(const BioLabel& l) {
  return l.tag != BioTag::O && l.category == Category::mac ? BioLabel::outside() : l;
}

inline std::vector<BioLabel> without_mac(std::vector<BioLabel> labels) {
  for (auto& l : labels) l = drop_mac(l);
  return labels;
}

// A non-O prediction is correct when it equals the gold label exactly.
inline Counts token_counts(const std::vector<BioLabel>& pred, const std::vector<BioLabel>& gold) {
  if (pred.size() != gold.size()) {
    throw Error(ErrorCode::length_mismatch, "predicted " + std::to_string(pred.size()) + " labels for " +
                                                std::to_string(gold.size()) + " tokens");
  }
  Counts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i].tag != BioTag::O, g = gold[i].tag != BioTag::O;
    c.predicted += p;
    c.gold += g;
    c.correct += p && g && pred[i] == gold[i];
  }
  return c;
}

inline Prf token_metrics(const std::vector<BioLabel>& pred, const std::vector<BioLabel>& gold) {
  return prf(token_counts(pred, gold));
}

using SpanKey = std::tuple<std::size_t, std::size_t, Category>;

inline std::vector<SpanKey> span_keys(const std::vector<annotate::TermSpan>& spans) {
  std::vector<SpanKey> keys;
  for (const auto& s : spans) keys.emplace_back(s.start, s.end, s.category);
  std::sort(keys.begin(), keys.end());
  return keys;
}

// Exact (start, end, category) matching, multiset semantics.
inline Counts entity_counts(const std::vector<annotate::TermSpan>& pred, const std::vector<annotate::TermSpan>& gold) {
  const auto p = span_keys(pred), g = span_keys(gold);
  Counts c;
  c.predicted = p.size();
  c.gold = g.size();
  std::vector<SpanKey> common;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
  c.correct = common.size();
  return c;
}

inline Prf entity_metrics(const std::vector<annotate::TermSpan>& pred, const std::vector<annotate::TermSpan>& gold) {
  return prf(entity_counts(pred, gold));
}

inline Counts entity_counts(const std::vector<BioLabel>& pred, const std::vector<BioLabel>& gold) {
  if (pred.size() != gold.size()) throw Error(ErrorCode::length_mismatch, "label sequences differ in length");
  return entity_counts(annotate::from_bio(pred), annotate::from_bio(gold));
}

// Corpus-level scores over aligned sentence lists.
struct SequenceScores {
  Counts token, entity;

  void add(const std::vector<BioLabel>& pred, const std::vector<BioLabel>& gold, bool include_mac = true) {
    if (include_mac) {
      token += token_counts(pred, gold);
      entity += entity_counts(pred, gold);
    } else {
      const auto p = without_mac(pred), g = without_mac(gold);
      token += token_counts(p, g);
      entity += entity_counts(p, g);
    }
  }

  Prf at(Level l) const { return prf(l == Level::token ? token : entity); }
};

inline SequenceScores score_corpus(const std::vector<std::vector<BioLabel>>& pred,
                                   const std::vector<std::vector<BioLabel>>& gold, bool include_mac = true) {
  if (pred.size() != gold.size()) throw Error(ErrorCode::length_mismatch, "sentence counts differ");
  SequenceScores s;
  for (std::size_t i = 0; i < pred.size(); ++i) s.add(pred[i], gold[i], include_mac);
  return s;
}

}  // namespace lexiforge::eval
