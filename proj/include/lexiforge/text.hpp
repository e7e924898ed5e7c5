#pragma once

// UTF-8 helpers and the canonical term normalization shared by every stage.

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lexiforge/error.hpp"

namespace lexiforge::text {

using LemmaTable = std::map<std::string, std::string, std::less<>>;

inline bool is_valid_utf8(std::string_view s) {
  int32_t i = 0;
  const auto n = static_cast<int32_t>(s.size());
  while (i < n) {
    UChar32 c;
    U8_NEXT(s.data(), i, n, c);
    if (c < 0) return false;
  }
  return true;
}

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

// Decodes into code points with byte ranges. Invalid bytes decode as U+FFFD.
inline std::vector<CodePoint> code_points(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  int32_t i = 0;
  const auto n = static_cast<int32_t>(s.size());
  while (i < n) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s.data(), i, n, c);
    if (c < 0) c = 0xFFFD;
    out.push_back({c, static_cast<std::size_t>(start), static_cast<std::size_t>(i)});
  }
  return out;
}

inline void append_utf8(std::string& out, UChar32 c) {
  char buf[4];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, 4, c, error);
  if (!error) out.append(buf, static_cast<std::size_t>(len));
}

inline bool is_space(UChar32 c) { return u_isUWhiteSpace(c) || c == 0x200B; }
inline bool is_upper(UChar32 c) { return u_isupper(c) || u_istitle(c); }
inline bool is_alnum(UChar32 c) { return u_isalnum(c); }
inline bool is_digit(UChar32 c) { return u_isdigit(c); }

inline std::string from_unicode(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

inline std::string trim(std::string_view s) {
  const auto cps = code_points(s);
  std::size_t lo = 0, hi = cps.size();
  while (lo < hi && is_space(cps[lo].value)) ++lo;
  while (hi > lo && is_space(cps[hi - 1].value)) --hi;
  if (lo == hi) return {};
  return std::string(s.substr(cps[lo].begin, cps[hi - 1].end - cps[lo].begin));
}

// Collapses runs of Unicode whitespace to one ASCII space and trims the ends.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (const auto& cp : code_points(s)) {
    if (is_space(cp.value)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(s.substr(cp.begin, cp.end - cp.begin));
  }
  return out;
}

// NFKC, case fold, and removal of combining marks (accent fold via NFD).
inline std::string fold(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  const icu::Normalizer2* nfd = icu::Normalizer2::getNFDInstance(status);
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::encoding, "ICU normalizers unavailable");

  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u = nfkc->normalize(u, status);
  u.foldCase(U_FOLD_CASE_DEFAULT);
  u = nfd->normalize(u, status);
  icu::UnicodeString stripped;
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    if (u_charType(c) != U_NON_SPACING_MARK) stripped.append(c);
    i += U16_LENGTH(c);
  }
  stripped = nfc->normalize(stripped, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::encoding, "normalization failed");
  return from_unicode(stripped);
}

inline bool is_closing_punct(UChar32 c) {
  switch (c) {
    case ',': case '.': case ';': case ':': case '!': case '?': case ')': case ']': case '}':
      return true;
    default:
      return false;
  }
}

inline bool is_opening_punct(UChar32 c) { return c == '(' || c == '[' || c == '{'; }

inline std::string tidy_spacing(std::string_view s) {
  const std::string collapsed = collapse_whitespace(s);
  const auto cps = code_points(collapsed);
  std::string out;
  out.reserve(collapsed.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i].value;
    if (c == ' ') {
      const bool before_closing = i + 1 < cps.size() && is_closing_punct(cps[i + 1].value);
      const bool after_opening = i > 0 && is_opening_punct(cps[i - 1].value);
      if (before_closing || after_opening) continue;
    }
    out.append(collapsed, cps[i].begin, cps[i].end - cps[i].begin);
  }
  return out;
}

inline std::vector<std::string> split_spaces(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

// Canonical form of a term: NFKC, lowercase, accent fold, tidy spacing around
// punctuation, collapsed whitespace, then optional token-level lemma
// substitution. Idempotent whenever no lemma maps onto another table key.
inline std::string normalize_term(std::string_view surface, const LemmaTable* lemmas = nullptr) {
  std::string current(surface);
  // Folding can expose new compatibility or case forms; iterate to a fixpoint.
  for (int round = 0; round < 4; ++round) {
    std::string next = tidy_spacing(fold(current));
    if (next == current) break;
    current = std::move(next);
  }
  if (lemmas == nullptr || lemmas->empty()) return current;
  auto tokens = split_spaces(current);
  for (auto& tok : tokens) {
    if (auto it = lemmas->find(tok); it != lemmas->end()) tok = it->second;
  }
  return join(tokens, " ");
}

inline LemmaTable load_lemma_table(std::istream& in) {
  LemmaTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    table[fold(line.substr(0, tab))] = fold(line.substr(tab + 1));
  }
  return table;
}

}  // namespace lexiforge::text
