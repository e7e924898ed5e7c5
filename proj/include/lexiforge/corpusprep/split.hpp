#pragma once

// The four train/test dataset schemes. Splitting is keyword-first: term types
// are shuffled into a train-keyword set, only blocks whose term is a
// train-keyword may go to train, and per-source fractions are then applied
// over those eligible blocks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "lexiforge/corpusprep/blocks.hpp"
#include "lexiforge/error.hpp"
#include "lexiforge/rng.hpp"

namespace lexiforge::corpusprep {

struct SplitScheme {
  int id = 1;
  double web_train_frac = 1.0;
  double pdf_train_frac = 0.0;
  double keyword_train_frac = 1.0;
  bool per_source_keywords = false;
  std::uint64_t seed = 0;
};

inline SplitScheme make_scheme(int id, std::uint64_t seed = 0) {
  switch (id) {
    case 1: return {1, 1.0, 0.0, 1.0, false, seed};
    case 2: return {2, 1.0, 0.0, 0.8, false, seed};
    case 3: return {3, 0.75, 0.25, 0.7, false, seed};
    case 4: return {4, 0.5, 0.5, 0.5, true, seed};
    default: throw Error(ErrorCode::config, "split scheme must be 1..4, got " + std::to_string(id));
  }
}

struct DatasetSplit {
  std::vector<ContextBlock> train;
  std::vector<ContextBlock> test;
  std::vector<std::string> train_keywords;  // sorted
};

namespace detail {

inline std::vector<std::string> distinct_terms(const std::vector<ContextBlock>& blocks) {
  std::set<std::string> terms;
  for (const auto& b : blocks) terms.insert(b.term);
  return {terms.begin(), terms.end()};
}

inline std::size_t fraction_count(double frac, std::size_t n) {
  if (frac <= 0.0 || n == 0) return 0;
  const auto k = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n);
}

inline std::set<std::string> pick_keywords(std::vector<std::string> terms, double frac, Rng& rng) {
  shuffle(terms, rng);
  terms.resize(fraction_count(frac, terms.size()));
  return {terms.begin(), terms.end()};
}

// Moves round(frac * |blocks|) eligible blocks (at most all eligible ones) to
// train, chosen by seeded shuffle over block_id order.
inline void assign_source(std::vector<ContextBlock> blocks, const std::set<std::string>& keywords, double frac,
                          Rng& rng, DatasetSplit& out) {
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.block_id < b.block_id; });
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (keywords.count(blocks[i].term)) eligible.push_back(i);
  }
  shuffle(eligible, rng);
  const std::size_t target = std::min(fraction_count(frac, blocks.size()), eligible.size());
  std::vector<bool> to_train(blocks.size(), false);
  for (std::size_t i = 0; i < target; ++i) to_train[eligible[i]] = true;
  for (std::size_t i = 0; i < blocks.size(); ++i) (to_train[i] ? out.train : out.test).push_back(std::move(blocks[i]));
}

}  // namespace detail

inline DatasetSplit split_dataset(const std::vector<ContextBlock>& web, const std::vector<ContextBlock>& pdf,
                                  const SplitScheme& scheme) {
  const bool needs_pdf = scheme.id != 2;
  if (web.empty()) throw Error(ErrorCode::insufficient_blocks, "scheme " + std::to_string(scheme.id) + " needs web blocks");
  if (needs_pdf && pdf.empty()) {
    throw Error(ErrorCode::insufficient_blocks, "scheme " + std::to_string(scheme.id) + " needs pdf blocks");
  }

  Rng rng(scheme.seed);
  DatasetSplit out;
  std::set<std::string> keywords;
  if (scheme.per_source_keywords) {
    const auto web_kw = detail::pick_keywords(detail::distinct_terms(web), scheme.keyword_train_frac, rng);
    const auto pdf_kw = detail::pick_keywords(detail::distinct_terms(pdf), scheme.keyword_train_frac, rng);
    detail::assign_source(web, web_kw, scheme.web_train_frac, rng, out);
    detail::assign_source(pdf, pdf_kw, scheme.pdf_train_frac, rng, out);
    keywords = web_kw;
    keywords.insert(pdf_kw.begin(), pdf_kw.end());
  } else {
    std::vector<ContextBlock> all = web;
    all.insert(all.end(), pdf.begin(), pdf.end());
    keywords = detail::pick_keywords(detail::distinct_terms(all), scheme.keyword_train_frac, rng);
    detail::assign_source(web, keywords, scheme.web_train_frac, rng, out);
    detail::assign_source(pdf, keywords, scheme.pdf_train_frac, rng, out);
  }
  if (out.train.empty()) throw Error(ErrorCode::insufficient_blocks, "split left the train side empty");
  out.train_keywords.assign(keywords.begin(), keywords.end());
  return out;
}

inline void write_ids(std::ostream& out, const std::vector<ContextBlock>& blocks) {
  for (const auto& b : blocks) out << b.block_id << '\n';
}

}  // namespace lexiforge::corpusprep
