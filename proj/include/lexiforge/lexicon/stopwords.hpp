#pragma once

#include <set>
#include <string>
#include <string_view>

namespace lexiforge::lexicon {

// English function words used as candidate-chunk boundaries.
inline const std::set<std::string, std::less<>>& english_stopwords() {
  static const std::set<std::string, std::less<>> words = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any", "are",
      "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by",
      "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from",
      "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
      "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "may",
      "me", "might", "more", "most", "must", "my", "myself", "no", "nor", "not", "now", "of", "off",
      "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same",
      "shall", "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
      "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too", "under",
      "until", "up", "upon", "us", "very", "was", "we", "were", "what", "when", "where", "which",
      "while", "who", "whom", "why", "will", "with", "within", "without", "would", "you", "your",
      "yours", "yourself", "yourselves"};
  return words;
}

inline bool is_stopword(std::string_view token) { return english_stopwords().count(token) > 0; }

}  // namespace lexiforge::lexicon
