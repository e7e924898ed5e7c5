#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexiforge/annotate/annotation.hpp"
#include "lexiforge/annotate/bio.hpp"
#include "lexiforge/annotate/match.hpp"
#include "lexiforge/annotate/sentence.hpp"
#include "lexiforge/error.hpp"

namespace lexiforge::annotate {

using json = nlohmann::ordered_json;

enum class Source { web, pdf };

inline std::string_view to_string(Source s) { return s == Source::web ? "web" : "pdf"; }

inline Source parse_source(std::string_view s) {
  if (s == "web") return Source::web;
  if (s == "pdf") return Source::pdf;
  throw Error(ErrorCode::parse, "unknown source '" + std::string(s) + "'");
}

struct AnnotatedSentence {
  Sentence sentence;
  std::vector<TermSpan> spans;
  Source source = Source::web;

  std::vector<BioLabel> labels() const { return to_bio(sentence, spans); }
};

inline json span_to_json(const TermSpan& sp) {
  json j;
  j["start"] = sp.start;
  j["end"] = sp.end;
  j["category"] = code(sp.category);
  j["canonical"] = sp.canonical;
  if (sp.is_macro) j["constituents"] = sp.constituents;
  return j;
}

inline TermSpan span_from_json(const json& j) {
  TermSpan sp;
  sp.start = j.at("start").get<std::size_t>();
  sp.end = j.at("end").get<std::size_t>();
  auto cat = category_from_code(j.at("category").get<std::string>());
  if (!cat) throw Error(ErrorCode::bad_category, j.at("category").get<std::string>());
  sp.category = *cat;
  sp.is_macro = *cat == Category::mac;
  sp.canonical = j.at("canonical").get<std::string>();
  if (j.contains("constituents")) sp.constituents = j.at("constituents").get<std::vector<std::string>>();
  return sp;
}

inline json to_json(const AnnotatedSentence& a) {
  json j;
  j["doc_id"] = a.sentence.doc_id;
  j["index"] = a.sentence.index;
  j["source"] = to_string(a.source);
  j["text"] = a.sentence.text;
  j["tokens"] = a.sentence.tokens;
  json spans = json::array();
  for (const auto& sp : a.spans) spans.push_back(span_to_json(sp));
  j["spans"] = std::move(spans);
  return j;
}

inline AnnotatedSentence annotated_from_json(const json& j) {
  AnnotatedSentence a;
  a.sentence = make_sentence(j.at("text").get<std::string>(), j.at("doc_id").get<std::string>(),
                             j.at("index").get<std::size_t>());
  if (j.contains("tokens") && j.at("tokens").get<std::vector<std::string>>() != a.sentence.tokens) {
    throw Error(ErrorCode::parse, "tokens do not match text for " + a.sentence.doc_id);
  }
  a.source = parse_source(j.at("source").get<std::string>());
  for (const auto& s : j.at("spans")) a.spans.push_back(span_from_json(s));
  return a;
}

inline void write_jsonl(std::ostream& out, const std::vector<AnnotatedSentence>& sentences) {
  for (const auto& a : sentences) out << to_json(a).dump() << '\n';
}

inline std::vector<AnnotatedSentence> read_sentences_jsonl(std::istream& in) {
  std::vector<AnnotatedSentence> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(annotated_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse, "line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

// Splits each document's passages into sentences (indices run across the
// whole document) and annotates them against the matcher.
struct DocumentText {
  std::string doc_id;
  Source source = Source::web;
  std::vector<std::string> passages;
};

inline std::vector<AnnotatedSentence> annotate_document(const DocumentText& doc, const TermMatcher& matcher,
                                                        const Abbreviations& abbreviations = default_abbreviations()) {
  std::vector<AnnotatedSentence> out;
  for (const auto& passage : doc.passages) {
    for (auto& s : split_sentences(passage, doc.doc_id, abbreviations, out.size())) {
      AnnotatedSentence a;
      a.spans = matcher.match(s);
      a.sentence = std::move(s);
      a.source = doc.source;
      out.push_back(std::move(a));
    }
  }
  return out;
}

// CoNLL-style export: `token<TAB>label[<TAB>predicted]`, blank line between
// sentences, optional `# sent_id = doc:index` comment lines.
struct ConllSentence {
  std::string sent_id;
  std::vector<std::string> tokens;
  std::vector<BioLabel> gold;
  std::vector<BioLabel> predicted;  // empty when the file has two columns
};

inline void write_conll(std::ostream& out, const ConllSentence& s) {
  if (!s.sent_id.empty()) out << "# sent_id = " << s.sent_id << '\n';
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    out << s.tokens[i] << '\t' << to_string(s.gold[i]);
    if (!s.predicted.empty()) out << '\t' << to_string(s.predicted[i]);
    out << '\n';
  }
  out << '\n';
}

inline std::string sentence_id(const Sentence& s) { return s.doc_id + ":" + std::to_string(s.index); }

inline ConllSentence to_conll(const AnnotatedSentence& a) {
  return {sentence_id(a.sentence), a.sentence.tokens, a.labels(), {}};
}

inline std::vector<ConllSentence> read_conll(std::istream& in) {
  std::vector<ConllSentence> out;
  ConllSentence cur;
  std::string line;
  std::size_t n = 0;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = {};
  };
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.rfind("# ", 0) == 0) {
      constexpr std::string_view kId = "# sent_id = ";
      if (line.rfind(kId, 0) == 0) cur.sent_id = line.substr(kId.size());
      continue;
    }
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 2 || cols.size() > 3) {
      throw Error(ErrorCode::parse, "line " + std::to_string(n) + ": expected 2 or 3 tab-separated columns");
    }
    auto gold = parse_bio_label(cols[1]);
    if (!gold) throw Error(ErrorCode::parse, "line " + std::to_string(n) + ": bad label '" + cols[1] + "'");
    cur.tokens.push_back(cols[0]);
    cur.gold.push_back(*gold);
    if (cols.size() == 3) {
      auto pred = parse_bio_label(cols[2]);
      if (!pred) throw Error(ErrorCode::parse, "line " + std::to_string(n) + ": bad label '" + cols[2] + "'");
      cur.predicted.push_back(*pred);
    }
    if (!cur.predicted.empty() && cur.predicted.size() != cur.tokens.size()) {
      throw Error(ErrorCode::parse, "line " + std::to_string(n) + ": inconsistent column count");
    }
  }
  flush();
  return out;
}

}  // namespace lexiforge::annotate
