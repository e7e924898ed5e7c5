#pragma once

// Offline language identification: multinomial naive Bayes over character
// trigrams with add-one smoothing. Confidence is the posterior of the chosen
// language under a uniform prior.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexiforge/ingest/langid_profiles.hpp"
#include "lexiforge/text.hpp"

namespace lexiforge::ingest {

struct LanguageGuess {
  std::string lang;
  double confidence = 0;
};

inline constexpr std::size_t kMinLanguageChars = 20;

// Lowercased letters with every other run collapsed to one space, padded.
inline std::vector<std::u32string> text_trigrams(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.foldCase(U_FOLD_CASE_DEFAULT);
  std::u32string norm = U" ";
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    i += U16_LENGTH(c);
    if (u_isalpha(c)) {
      norm.push_back(static_cast<char32_t>(c));
    } else if (norm.back() != U' ') {
      norm.push_back(U' ');
    }
  }
  if (norm.back() != U' ') norm.push_back(U' ');
  std::vector<std::u32string> out;
  for (std::size_t i = 0; i + 3 <= norm.size(); ++i) out.push_back(norm.substr(i, 3));
  return out;
}

class LanguageIdentifier {
 public:
  LanguageIdentifier() : LanguageIdentifier(profile_texts()) {}

  explicit LanguageIdentifier(const std::vector<std::pair<std::string_view, std::string_view>>& training) {
    std::map<std::u32string, bool> vocab;
    for (const auto& [lang, sample] : training) {
      Profile p;
      p.lang = std::string(lang);
      for (auto& g : text_trigrams(sample)) {
        ++p.counts[g];
        ++p.total;
        vocab[g] = true;
      }
      profiles_.push_back(std::move(p));
    }
    vocab_size_ = vocab.size() + 1;
  }

  std::vector<std::string> languages() const {
    std::vector<std::string> out;
    for (const auto& p : profiles_) out.push_back(p.lang);
    return out;
  }

  // Posterior per language, in profile order.
  std::vector<double> posteriors(std::string_view s) const {
    const auto grams = text_trigrams(s);
    std::vector<double> ll(profiles_.size(), 0.0);
    for (std::size_t k = 0; k < profiles_.size(); ++k) {
      const auto& p = profiles_[k];
      const double denom = std::log(static_cast<double>(p.total + vocab_size_));
      for (const auto& g : grams) {
        auto it = p.counts.find(g);
        const double c = it == p.counts.end() ? 0.0 : static_cast<double>(it->second);
        ll[k] += std::log(c + 1.0) - denom;
      }
    }
    const double top = *std::max_element(ll.begin(), ll.end());
    double z = 0;
    for (auto& x : ll) z += (x = std::exp(x - top));
    for (auto& x : ll) x /= z;
    return ll;
  }

  LanguageGuess classify(std::string_view s) const {
    const auto post = posteriors(s);
    // First profile wins exact ties.
    const auto best = static_cast<std::size_t>(std::max_element(post.begin(), post.end()) - post.begin());
    return {profiles_[best].lang, post[best]};
  }

 private:
  struct Profile {
    std::string lang;
    std::unordered_map<std::u32string, std::size_t> counts;
    std::size_t total = 0;
  };
  std::vector<Profile> profiles_;
  std::size_t vocab_size_ = 1;
};

inline const LanguageIdentifier& default_identifier() {
  static const LanguageIdentifier id;
  return id;
}

// "en-US" -> "en".
inline std::string primary_subtag(std::string_view tag) {
  std::string out;
  for (char c : tag) {
    if (c == '-' || c == '_') break;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Declared language is kept when the classifier agrees with it; otherwise
// the classifier's choice stands. Short texts are undecidable.
inline LanguageGuess detect_language(std::string_view s, std::string_view declared = {},
                                     const LanguageIdentifier& id = default_identifier()) {
  const auto collapsed = text::collapse_whitespace(s);
  const auto decl = primary_subtag(declared);
  if (text::code_points(collapsed).size() < kMinLanguageChars) return {decl.empty() ? "und" : decl, 0.0};
  return id.classify(collapsed);
}

}  // namespace lexiforge::ingest
