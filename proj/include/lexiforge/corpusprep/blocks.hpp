#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "lexiforge/annotate/corpus.hpp"
#include "lexiforge/corpusprep/embeddings.hpp"
#include "lexiforge/lexicon/lexicon.hpp"

namespace lexiforge::corpusprep {

using annotate::AnnotatedSentence;
using annotate::Source;

inline constexpr std::size_t kBlockRadius = 2;
inline constexpr double kDefaultThreshold = 0.5;

// Up to five consecutive sentences of one document centred on a sentence
// holding `term`.
struct ContextBlock {
  std::string block_id;
  std::vector<AnnotatedSentence> sentences;
  std::size_t center_index = 0;
  std::string term;
  Category category = Category::inn;
  Source source = Source::web;
  double similarity = 0.0;

  const AnnotatedSentence& center() const { return sentences[center_index]; }

  std::vector<std::string> tokens() const {
    std::vector<std::string> out;
    for (const auto& s : sentences) out.insert(out.end(), s.sentence.tokens.begin(), s.sentence.tokens.end());
    return out;
  }
};

inline std::string make_block_id(const std::string& doc_id, std::size_t sentence_index, std::size_t term_ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "/s%06zu/t%02zu", sentence_index, term_ordinal);
  return doc_id + buf;
}

// One block per (centre sentence, distinct term canonical). `document` holds
// one document's sentences in order; edge blocks keep the neighbours that
// exist.
inline std::vector<ContextBlock> build_blocks(const std::vector<AnnotatedSentence>& document) {
  std::vector<ContextBlock> out;
  for (std::size_t i = 0; i < document.size(); ++i) {
    std::vector<std::string> seen;
    for (const auto& sp : document[i].spans) {
      if (std::find(seen.begin(), seen.end(), sp.canonical) != seen.end()) continue;
      seen.push_back(sp.canonical);
      const std::size_t lo = i >= kBlockRadius ? i - kBlockRadius : 0;
      const std::size_t hi = std::min(document.size(), i + kBlockRadius + 1);
      ContextBlock b;
      b.block_id = make_block_id(document[i].sentence.doc_id, document[i].sentence.index, seen.size() - 1);
      b.sentences.assign(document.begin() + static_cast<std::ptrdiff_t>(lo),
                         document.begin() + static_cast<std::ptrdiff_t>(hi));
      b.center_index = i - lo;
      b.term = sp.canonical;
      b.category = sp.category;
      b.source = document[i].source;
      out.push_back(std::move(b));
    }
  }
  return out;
}

// Groups a flat sentence list by document (stable order of first appearance,
// sentences sorted by index) and builds blocks for each.
inline std::vector<ContextBlock> build_blocks_for_corpus(const std::vector<AnnotatedSentence>& sentences) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<AnnotatedSentence>> docs;
  for (const auto& s : sentences) {
    auto [it, inserted] = docs.try_emplace(s.sentence.doc_id);
    if (inserted) order.push_back(s.sentence.doc_id);
    it->second.push_back(s);
  }
  std::vector<ContextBlock> out;
  for (const auto& id : order) {
    auto& doc = docs[id];
    std::stable_sort(doc.begin(), doc.end(), [](const auto& a, const auto& b) {
      return a.sentence.index < b.sentence.index;
    });
    auto blocks = build_blocks(doc);
    for (auto& b : blocks) out.push_back(std::move(b));
  }
  return out;
}

inline double block_similarity(const ContextBlock& b, const EmbeddingStore& store) {
  const auto term_tokens = lexicon::canonical_tokens(b.term);
  const auto block_tokens = b.tokens();
  return cosine(phrase_vector(term_tokens, store), phrase_vector(block_tokens, store));
}

// Scores every block (kept for audit) and returns those at or above the
// threshold, in input order.
inline std::vector<ContextBlock> filter_blocks(std::vector<ContextBlock>& blocks, const EmbeddingStore& store,
                                               double threshold = kDefaultThreshold) {
  std::vector<ContextBlock> kept;
  for (auto& b : blocks) {
    b.similarity = block_similarity(b, store);
    if (b.similarity >= threshold) kept.push_back(b);
  }
  return kept;
}

// Distinct sentences across blocks, ordered by (doc_id, index).
inline std::vector<AnnotatedSentence> unique_sentences(const std::vector<ContextBlock>& blocks) {
  std::map<std::pair<std::string, std::size_t>, const AnnotatedSentence*> seen;
  for (const auto& b : blocks) {
    for (const auto& s : b.sentences) seen.try_emplace({s.sentence.doc_id, s.sentence.index}, &s);
  }
  std::vector<AnnotatedSentence> out;
  out.reserve(seen.size());
  for (const auto& [_, s] : seen) out.push_back(*s);
  return out;
}

inline annotate::json to_json(const ContextBlock& b) {
  annotate::json j;
  j["block_id"] = b.block_id;
  j["term"] = b.term;
  j["category"] = code(b.category);
  j["source"] = annotate::to_string(b.source);
  j["center_index"] = b.center_index;
  j["similarity"] = b.similarity;
  annotate::json sents = annotate::json::array();
  for (const auto& s : b.sentences) sents.push_back(annotate::to_json(s));
  j["sentences"] = std::move(sents);
  return j;
}

inline ContextBlock block_from_json(const annotate::json& j) {
  ContextBlock b;
  b.block_id = j.at("block_id").get<std::string>();
  b.term = j.at("term").get<std::string>();
  auto cat = category_from_code(j.at("category").get<std::string>());
  if (!cat) throw Error(ErrorCode::bad_category, j.at("category").get<std::string>());
  b.category = *cat;
  b.source = annotate::parse_source(j.at("source").get<std::string>());
  b.center_index = j.at("center_index").get<std::size_t>();
  b.similarity = j.at("similarity").get<double>();
  for (const auto& s : j.at("sentences")) b.sentences.push_back(annotate::annotated_from_json(s));
  if (b.center_index >= b.sentences.size()) throw Error(ErrorCode::parse, b.block_id + ": centre out of range");
  return b;
}

inline void write_blocks(std::ostream& out, const std::vector<ContextBlock>& blocks) {
  for (const auto& b : blocks) out << to_json(b).dump() << '\n';
}

inline std::vector<ContextBlock> read_blocks(std::istream& in) {
  std::vector<ContextBlock> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(block_from_json(annotate::json::parse(line)));
    } catch (const annotate::json::exception& e) {
      throw Error(ErrorCode::parse, "blocks line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lexiforge::corpusprep
