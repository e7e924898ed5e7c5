#pragma once

// New-term proposals from tagger output. Predicted runs become spans, are
// normalized, and survive only if they are multi-token, unknown to the gold
// lexicon and close enough to their category's reference vector.

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "lexiforge/annotate/bio.hpp"
#include "lexiforge/annotate/corpus.hpp"
#include "lexiforge/corpusprep/embeddings.hpp"
#include "lexiforge/lexicon/lexicon.hpp"

namespace lexiforge::extract {

using annotate::json;

inline const std::vector<std::string>& default_seed_keywords() {
  static const std::vector<std::string> k = {"innovation", "recherche", "development", "strategy", "design"};
  return k;
}

struct Occurrence {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::size_t start = 0, end = 0;
  std::string context;  // the sentence text

  auto key() const { return std::tie(doc_id, sentence_index, start, end); }
  bool operator==(const Occurrence&) const = default;
};

struct CandidateTerm {
  std::string canonical;
  Category category = Category::inn;
  std::size_t token_count = 0;
  std::vector<Occurrence> occurrences;
  double similarity = 0;
  std::string model_id;
  int scheme_id = 1;

  bool operator==(const CandidateTerm&) const = default;
};

struct CollectOptions {
  double threshold = 0.5;
  std::vector<std::string> seed_keywords = default_seed_keywords();
  std::string model_id;
  int scheme_id = 1;
};

// Seed keywords plus every gold term of the category, pooled token-wise.
// Macro predictions have no gold terms of their own and use the keywords.
inline corpusprep::Vector reference_vector(Category category, const lexicon::Lexicon& lex,
                                           const corpusprep::EmbeddingStore& store,
                                           const std::vector<std::string>& seed_keywords) {
  std::vector<std::string> pool;
  for (const auto& k : seed_keywords) {
    for (auto& t : lexicon::canonical_tokens(text::normalize_term(k))) pool.push_back(std::move(t));
  }
  for (const auto& [canonical, term] : lex.by_canonical()) {
    if (term.category != category) continue;
    for (auto& t : lexicon::canonical_tokens(canonical)) pool.push_back(std::move(t));
  }
  return corpusprep::phrase_vector(pool, store);
}

inline std::vector<CandidateTerm> collect_candidates(const std::vector<std::vector<annotate::BioLabel>>& predictions,
                                                     const std::vector<annotate::Sentence>& sentences,
                                                     const lexicon::Lexicon& lex,
                                                     const corpusprep::EmbeddingStore& store,
                                                     const CollectOptions& opt = {}) {
  if (predictions.size() != sentences.size()) {
    throw Error(ErrorCode::length_mismatch, "predictions and sentences differ in count");
  }
  struct Pending {
    std::map<Category, std::size_t> votes;
    std::vector<Occurrence> occurrences;
  };
  std::map<std::string, Pending> merged;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    if (predictions[i].size() != s.size()) {
      throw Error(ErrorCode::length_mismatch, "prediction length differs from sentence " + annotate::sentence_id(s));
    }
    for (const auto& sp : annotate::from_bio(predictions[i])) {
      auto canonical = text::normalize_term(annotate::surface_text(s, sp.start, sp.end));
      if (lexicon::canonical_tokens(canonical).size() < 2 || lex.contains(canonical)) continue;
      auto& p = merged[canonical];
      ++p.votes[sp.category];
      p.occurrences.push_back({s.doc_id, s.index, sp.start, sp.end, s.text});
    }
  }

  std::map<Category, corpusprep::Vector> refs;
  std::vector<CandidateTerm> out;
  for (auto& [canonical, p] : merged) {
    // Most frequent predicted category; ties go to the earlier code.
    auto best = std::max_element(p.votes.begin(), p.votes.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    const Category cat = best->first;
    auto ref = refs.find(cat);
    if (ref == refs.end()) ref = refs.emplace(cat, reference_vector(cat, lex, store, opt.seed_keywords)).first;
    const auto toks = lexicon::canonical_tokens(canonical);
    const double sim = corpusprep::cosine(corpusprep::phrase_vector(toks, store), ref->second);
    if (sim < opt.threshold) continue;

    std::sort(p.occurrences.begin(), p.occurrences.end(),
              [](const Occurrence& a, const Occurrence& b) { return a.key() < b.key(); });
    CandidateTerm c;
    c.canonical = canonical;
    c.category = cat;
    c.token_count = toks.size();
    c.occurrences = std::move(p.occurrences);
    c.similarity = sim;
    c.model_id = opt.model_id;
    c.scheme_id = opt.scheme_id;
    out.push_back(std::move(c));
  }
  return out;
}

inline json to_json(const CandidateTerm& c) {
  json j;
  j["canonical"] = c.canonical;
  j["category"] = code(c.category);
  j["token_count"] = c.token_count;
  j["similarity"] = c.similarity;
  j["model_id"] = c.model_id;
  j["scheme_id"] = c.scheme_id;
  json occ = json::array();
  for (const auto& o : c.occurrences) {
    occ.push_back({{"doc_id", o.doc_id}, {"sentence", o.sentence_index}, {"start", o.start}, {"end", o.end},
                   {"context", o.context}});
  }
  j["occurrences"] = std::move(occ);
  return j;
}

inline CandidateTerm candidate_from_json(const json& j) {
  CandidateTerm c;
  c.canonical = j.at("canonical").get<std::string>();
  const auto cat = category_from_code(j.at("category").get<std::string>());
  if (!cat) throw Error(ErrorCode::bad_category, j.at("category").get<std::string>());
  c.category = *cat;
  c.token_count = j.at("token_count").get<std::size_t>();
  c.similarity = j.at("similarity").get<double>();
  c.model_id = j.at("model_id").get<std::string>();
  c.scheme_id = j.at("scheme_id").get<int>();
  for (const auto& o : j.at("occurrences")) {
    c.occurrences.push_back({o.at("doc_id").get<std::string>(), o.at("sentence").get<std::size_t>(),
                             o.at("start").get<std::size_t>(), o.at("end").get<std::size_t>(),
                             o.value("context", std::string{})});
  }
  return c;
}

inline void write_candidates(std::ostream& out, const std::vector<CandidateTerm>& cs) {
  for (const auto& c : cs) out << to_json(c).dump() << '\n';
}

inline std::vector<CandidateTerm> read_candidates(std::istream& in) {
  std::vector<CandidateTerm> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(candidate_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse, "candidates line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lexiforge::extract
