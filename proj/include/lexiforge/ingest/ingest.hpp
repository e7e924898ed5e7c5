#pragma once

// Manifest-driven ingestion into a passage store: `passages.jsonl`,
// `stats.tsv` (per-language counts) and `skipped.tsv`.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lexiforge/annotate/corpus.hpp"
#include "lexiforge/annotate/tokenize.hpp"
#include "lexiforge/ingest/html.hpp"
#include "lexiforge/ingest/langid.hpp"
#include "lexiforge/ingest/rules.hpp"
#include "lexiforge/ingest/url.hpp"

namespace lexiforge::ingest {

namespace fs = std::filesystem;
using annotate::json;

enum class DocKind { html, text };
enum class SourceKind { web, pdf_text };

inline std::string_view to_string(SourceKind k) { return k == SourceKind::web ? "web" : "pdf_text"; }
inline SourceKind parse_source_kind(std::string_view s) {
  if (s == "web") return SourceKind::web;
  if (s == "pdf_text") return SourceKind::pdf_text;
  throw Error(ErrorCode::parse, "unknown source_kind '" + std::string(s) + "'");
}

struct Passage {
  std::string doc_id;
  std::string tag;
  std::string text;
  std::string lang;
  double lang_confidence = 0;
  SourceKind source_kind = SourceKind::web;
  // document metadata
  std::string url;
  std::string company;
  std::string sector;

  bool operator==(const Passage&) const = default;
};

// Whole-word keyword test, insensitive to case and accents. Multi-word
// keywords match as consecutive words.
class KeywordMatcher {
 public:
  explicit KeywordMatcher(const std::vector<std::string>& keywords) {
    for (const auto& k : keywords) {
      auto w = words(k);
      if (!w.empty()) keywords_.push_back(std::move(w));
    }
  }

  static std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (const auto& cp : text::code_points(text::fold(s))) {
      if (text::is_alnum(cp.value)) {
        text::append_utf8(cur, cp.value);
      } else if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }

  bool matches(std::string_view s) const {
    const auto w = words(s);
    for (const auto& k : keywords_) {
      for (std::size_t i = 0; i + k.size() <= w.size(); ++i) {
        if (std::equal(k.begin(), k.end(), w.begin() + static_cast<std::ptrdiff_t>(i))) return true;
      }
    }
    return false;
  }

 private:
  std::vector<std::vector<std::string>> keywords_;
};

// Allowed-tag elements carrying a seed keyword, first occurrence of each text.
inline std::vector<Passage> extract_passages(std::string_view doc, const FilterRules& rules,
                                             const std::string& doc_id = {}) {
  const auto html = decode_document(doc);
  const KeywordMatcher kw(rules.seed_keywords);
  std::set<std::string> seen;
  std::vector<Passage> out;
  for (auto& el : scan_elements(html, rules.allowed_tags)) {
    if (!kw.matches(el.text) || !seen.insert(el.text).second) continue;
    const auto guess = detect_language(el.text, el.lang);
    Passage p;
    p.doc_id = doc_id;
    p.tag = el.tag;
    p.text = std::move(el.text);
    p.lang = guess.lang;
    p.lang_confidence = guess.confidence;
    p.source_kind = SourceKind::web;
    out.push_back(std::move(p));
  }
  return out;
}

// Pre-extracted report text: one passage per blank-line separated paragraph.
inline std::vector<Passage> text_passages(std::string_view doc, const std::string& doc_id = {}) {
  const auto body = decode_document(doc);
  std::vector<Passage> out;
  std::set<std::string> seen;
  std::istringstream in(body);
  std::string line, para;
  auto flush = [&] {
    auto t = text::collapse_whitespace(para);
    para.clear();
    if (t.empty() || !seen.insert(t).second) return;
    const auto guess = detect_language(t);
    out.push_back({doc_id, "text", std::move(t), guess.lang, guess.confidence, SourceKind::pdf_text, {}, {}, {}});
  };
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) {
      flush();
    } else {
      para += line;
      para += ' ';
    }
  }
  flush();
  return out;
}

struct ManifestEntry {
  std::string doc_id;
  std::string path;  // resolved against the manifest's directory
  std::string url;
  std::string company;
  std::string sector;
  DocKind kind = DocKind::html;
};

using SourceManifest = std::vector<ManifestEntry>;

inline SourceManifest parse_manifest(const json& j, const fs::path& base = {}) {
  if (!j.is_array()) throw Error(ErrorCode::malformed, "manifest must be a JSON array");
  SourceManifest out;
  std::set<std::string> ids;
  const auto& sectors = sector_labels();
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const auto where = "manifest entry " + std::to_string(i) + ": ";
    ManifestEntry m;
    try {
      m.doc_id = e.at("doc_id").get<std::string>();
      m.path = e.at("path").get<std::string>();
      m.url = e.value("url", std::string{});
      m.company = e.value("company", std::string{});
      m.sector = e.at("sector").get<std::string>();
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "html") m.kind = DocKind::html;
      else if (kind == "text") m.kind = DocKind::text;
      else throw Error(ErrorCode::malformed, where + "kind must be html or text");
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::malformed, where + ex.what());
    }
    if (m.doc_id.empty()) throw Error(ErrorCode::malformed, where + "empty doc_id");
    if (!ids.insert(m.doc_id).second) throw Error(ErrorCode::malformed, where + "duplicate doc_id '" + m.doc_id + "'");
    if (std::find(sectors.begin(), sectors.end(), m.sector) == sectors.end()) {
      throw Error(ErrorCode::malformed, where + "unknown sector '" + m.sector + "'");
    }
    const auto ext = ascii_lower(fs::path(m.path).extension().string());
    const bool ok = m.kind == DocKind::text ? ext == ".txt" : (ext == ".html" || ext == ".htm" || ext == ".xhtml");
    if (!ok) throw Error(ErrorCode::malformed, where + "extension '" + ext + "' does not match kind");
    if (fs::path(m.path).is_relative() && !base.empty()) m.path = (base / m.path).lexically_normal().string();
    out.push_back(std::move(m));
  }
  return out;
}

inline SourceManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open manifest '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed, path + ": " + e.what());
  }
  return parse_manifest(j, fs::path(path).parent_path());
}

struct LanguageStats {
  std::string lang;
  std::size_t urls = 0;
  std::size_t sectors = 0;
  std::size_t tokens = 0;

  bool operator==(const LanguageStats&) const = default;
};

struct Skipped {
  std::string doc_id;
  std::string reason;
};

struct CorpusStore {
  std::vector<Passage> passages;
  std::vector<LanguageStats> stats;
  std::vector<Skipped> skipped;
};

// Rows ordered by URL count, then language code.
inline std::vector<LanguageStats> language_stats(const std::vector<Passage>& passages) {
  struct Acc {
    std::set<std::string> urls, sectors;
    std::size_t tokens = 0;
  };
  std::map<std::string, Acc> by;
  for (const auto& p : passages) {
    auto& a = by[p.lang];
    a.urls.insert(p.url.empty() ? p.doc_id : p.url);
    a.sectors.insert(p.sector);
    a.tokens += annotate::tokenize(p.text).tokens.size();
  }
  std::vector<LanguageStats> out;
  for (const auto& [lang, a] : by) out.push_back({lang, a.urls.size(), a.sectors.size(), a.tokens});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.urls > b.urls; });
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The URL filter applies to web pages only; report text has no homepage.
inline CorpusStore ingest(const SourceManifest& manifest, const FilterRules& rules) {
  rules.validate();
  CorpusStore store;
  for (const auto& e : manifest) {
    if (e.kind == DocKind::html) {
      const auto d = filter_url(e.url, rules);
      if (!d.keep) {
        store.skipped.push_back({e.doc_id, "url:" + d.reason});
        continue;
      }
    }
    std::string bytes;
    try {
      bytes = read_file(e.path);
    } catch (const Error&) {
      store.skipped.push_back({e.doc_id, "io_error"});
      continue;
    }
    std::vector<Passage> ps;
    try {
      ps = e.kind == DocKind::html ? extract_passages(bytes, rules, e.doc_id) : text_passages(bytes, e.doc_id);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::encoding) throw;
      store.skipped.push_back({e.doc_id, "encoding"});
      continue;
    }
    for (auto& p : ps) {
      p.url = e.url;
      p.company = e.company;
      p.sector = e.sector;
      store.passages.push_back(std::move(p));
    }
  }
  store.stats = language_stats(store.passages);
  return store;
}

inline json to_json(const Passage& p) {
  json j;
  j["doc_id"] = p.doc_id;
  j["url"] = p.url;
  j["company"] = p.company;
  j["sector"] = p.sector;
  j["tag"] = p.tag;
  j["text"] = p.text;
  j["lang"] = p.lang;
  j["lang_confidence"] = p.lang_confidence;
  j["source_kind"] = to_string(p.source_kind);
  return j;
}

inline Passage passage_from_json(const json& j) {
  Passage p;
  p.doc_id = j.at("doc_id").get<std::string>();
  p.url = j.value("url", std::string{});
  p.company = j.value("company", std::string{});
  p.sector = j.value("sector", std::string{});
  p.tag = j.at("tag").get<std::string>();
  p.text = j.at("text").get<std::string>();
  p.lang = j.at("lang").get<std::string>();
  p.lang_confidence = j.at("lang_confidence").get<double>();
  p.source_kind = parse_source_kind(j.at("source_kind").get<std::string>());
  return p;
}

inline void write_passages(std::ostream& out, const std::vector<Passage>& ps) {
  for (const auto& p : ps) out << to_json(p).dump() << '\n';
}

inline std::vector<Passage> read_passages(std::istream& in) {
  std::vector<Passage> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(passage_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse, "passages line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Passage> read_passages_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  return read_passages(in);
}

inline void write_stats(std::ostream& out, const std::vector<LanguageStats>& stats) {
  out << "Langues\tURLs\tSecteurs\tTokens\n";
  for (const auto& s : stats) out << s.lang << '\t' << s.urls << '\t' << s.sectors << '\t' << s.tokens << '\n';
}

inline void write_store(const CorpusStore& store, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "passages.jsonl", std::ios::binary);
    write_passages(out, store.passages);
  }
  {
    std::ofstream out(dir / "stats.tsv", std::ios::binary);
    write_stats(out, store.stats);
  }
  std::ofstream out(dir / "skipped.tsv", std::ios::binary);
  out << "doc_id\treason\n";
  for (const auto& s : store.skipped) out << s.doc_id << '\t' << s.reason << '\n';
  if (!out) throw Error(ErrorCode::io, "cannot write store in '" + dir.string() + "'");
}

// Passages grouped back into documents for annotation, in store order.
inline std::vector<annotate::DocumentText> documents_of(const std::vector<Passage>& passages,
                                                        const std::set<std::string>& languages = {}) {
  std::vector<annotate::DocumentText> out;
  std::map<std::string, std::size_t> index;
  for (const auto& p : passages) {
    if (!languages.empty() && !languages.count(p.lang)) continue;
    auto [it, fresh] = index.emplace(p.doc_id, out.size());
    if (fresh) {
      out.push_back({p.doc_id, p.source_kind == SourceKind::web ? annotate::Source::web : annotate::Source::pdf, {}});
    }
    out[it->second].passages.push_back(p.text);
  }
  return out;
}

}  // namespace lexiforge::ingest
