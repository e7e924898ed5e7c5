#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lexiforge/annotate/tokenize.hpp"
#include "lexiforge/category.hpp"
#include "lexiforge/error.hpp"
#include "lexiforge/text.hpp"

namespace lexiforge::lexicon {

struct Term {
  std::string surface;
  std::string canonical;
  Category category = Category::inn;
  std::size_t token_count = 0;

  bool operator==(const Term&) const = default;
};

inline std::vector<std::string> canonical_tokens(std::string_view canonical) {
  return annotate::tokenize(canonical).tokens;
}

inline Term make_term(std::string surface, Category category, const text::LemmaTable* lemmas = nullptr,
                      std::optional<std::string> canonical = std::nullopt) {
  Term t;
  t.canonical = canonical ? text::normalize_term(*canonical) : text::normalize_term(surface, lemmas);
  t.surface = std::move(surface);
  t.category = category;
  t.token_count = canonical_tokens(t.canonical).size();
  return t;
}

// Immutable value: merges return a new Lexicon with a bumped version.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::string version) : version_(std::move(version)) {}

  const std::string& version() const { return version_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  const Term* find(std::string_view canonical) const {
    auto it = terms_.find(canonical);
    return it == terms_.end() ? nullptr : &it->second;
  }
  bool contains(std::string_view canonical) const { return find(canonical) != nullptr; }

  // Ordered by canonical.
  std::vector<Term> terms() const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [_, t] : terms_) out.push_back(t);
    return out;
  }

  const std::map<std::string, Term, std::less<>>& by_canonical() const { return terms_; }

  // Adds a term; same canonical and category is a no-op, a different
  // category is a conflict.
  void insert(Term term) {
    if (term.canonical.empty()) throw Error(ErrorCode::malformed, "empty canonical form for '" + term.surface + "'");
    if (auto it = terms_.find(term.canonical); it != terms_.end()) {
      if (it->second.category != term.category) {
        throw Error(ErrorCode::duplicate_conflict,
                    "'" + term.canonical + "' is " + std::string(code(it->second.category)) + ", not " +
                        std::string(code(term.category)));
      }
      return;
    }
    terms_.emplace(term.canonical, std::move(term));
  }

 private:
  std::map<std::string, Term, std::less<>> terms_;
  std::string version_ = "1";
};

inline Lexicon load_lexicon(std::istream& in, const text::LemmaTable* lemmas = nullptr) {
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  bool has_canonical = false;
  std::string version = "1";
  std::vector<std::pair<std::size_t, Term>> rows;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      constexpr std::string_view kVersion = "# version:";
      if (line.rfind(kVersion, 0) == 0) version = text::trim(line.substr(kVersion.size()));
      continue;
    }
    if (!header_seen) {
      if (line == "surface\tcategory") {
        has_canonical = false;
      } else if (line == "surface\tcategory\tcanonical") {
        has_canonical = true;
      } else {
        throw Error(ErrorCode::parse, "row " + std::to_string(row) + ": expected header 'surface<TAB>category'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 2 || cols.size() > 3) {
      throw Error(ErrorCode::parse, "row " + std::to_string(row) + ": expected 2 or 3 columns");
    }
    const auto cat = category_from_code(text::trim(cols[1]));
    if (!cat || *cat == Category::mac) {
      throw Error(ErrorCode::bad_category, "row " + std::to_string(row) + ": unknown category '" + cols[1] + "'");
    }
    std::optional<std::string> canonical;
    if (has_canonical && cols.size() == 3 && !text::trim(cols[2]).empty()) canonical = cols[2];
    rows.emplace_back(row, make_term(text::trim(cols[0]), *cat, lemmas, canonical));
  }
  if (!header_seen && !rows.empty()) throw Error(ErrorCode::parse, "missing header");

  Lexicon lex(version);
  for (auto& [r, term] : rows) {
    try {
      lex.insert(std::move(term));
    } catch (const Error& e) {
      throw Error(e.code(), "row " + std::to_string(r) + ": " + e.what());
    }
  }
  return lex;
}

inline Lexicon load_lexicon_file(const std::string& path, const text::LemmaTable* lemmas = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open lexicon '" + path + "'");
  return load_lexicon(in, lemmas);
}

inline void write_lexicon(std::ostream& out, const Lexicon& lex) {
  out << "# version: " << lex.version() << "\n";
  out << "surface\tcategory\tcanonical\n";
  for (const auto& t : lex.terms()) {
    out << t.surface << '\t' << code(t.category) << '\t' << t.canonical << '\n';
  }
}

inline std::string next_version(const std::string& v) {
  try {
    std::size_t pos = 0;
    const long n = std::stol(v, &pos);
    if (pos == v.size()) return std::to_string(n + 1);
  } catch (const std::exception&) {
  }
  return v + ".1";
}

// All-or-nothing: on a category conflict the input lexicon is untouched and
// the error propagates.
inline Lexicon merge_accepted(const Lexicon& lexicon,
                              const std::vector<std::pair<std::string, Category>>& accepted,
                              const text::LemmaTable* lemmas = nullptr) {
  Lexicon out(next_version(lexicon.version()));
  for (const auto& [_, t] : lexicon.by_canonical()) out.insert(t);
  for (const auto& [ngram, cat] : accepted) {
    if (cat == Category::mac) {
      throw Error(ErrorCode::bad_category, "macro-terms must be given a lexicon category before merging");
    }
    out.insert(make_term(ngram, cat, lemmas));
  }
  return out;
}

}  // namespace lexiforge::lexicon
