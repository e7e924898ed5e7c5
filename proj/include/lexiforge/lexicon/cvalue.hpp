#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "lexiforge/annotate/tokenize.hpp"
#include "lexiforge/error.hpp"
#include "lexiforge/lexicon/stopwords.hpp"
#include "lexiforge/text.hpp"

namespace lexiforge::lexicon {

using Ngram = std::vector<std::string>;

struct CandidateScore {
  Ngram ngram;
  std::size_t frequency = 0;
  std::vector<Ngram> nested_in;
  double cvalue = 0.0;

  std::string text() const { return text::join(ngram, " "); }
};

// Normalized content-token runs of one document; stopwords and
// punctuation-only tokens end a run.
inline std::vector<Ngram> content_runs(std::string_view document) {
  std::vector<Ngram> runs;
  Ngram current;
  for (const auto& tok : annotate::tokenize(document).tokens) {
    const std::string norm = text::normalize_term(tok);
    if (norm.empty() || annotate::is_punctuation_token(norm) || is_stopword(norm)) {
      if (!current.empty()) runs.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(norm);
  }
  if (!current.empty()) runs.push_back(std::move(current));
  return runs;
}

// C-value termhood over candidate n-grams (length 2..max_n) drawn from
// content runs. Each document is one passage.
inline std::vector<CandidateScore> cvalue_candidates(const std::vector<std::string>& documents, std::size_t max_n,
                                                     std::size_t min_freq) {
  if (max_n < 2 || max_n > 6) throw Error(ErrorCode::config, "max_n must be in [2, 6]");
  if (min_freq < 1) throw Error(ErrorCode::config, "min_freq must be >= 1");

  std::map<Ngram, std::size_t> freq;
  for (const auto& doc : documents) {
    for (const auto& run : content_runs(doc)) {
      for (std::size_t n = 2; n <= max_n; ++n) {
        for (std::size_t i = 0; i + n <= run.size(); ++i) {
          ++freq[Ngram(run.begin() + static_cast<std::ptrdiff_t>(i), run.begin() + static_cast<std::ptrdiff_t>(i + n))];
        }
      }
    }
  }
  std::erase_if(freq, [&](const auto& kv) { return kv.second < min_freq; });

  std::map<Ngram, std::set<Ngram>> containers;
  for (const auto& [longer, _] : freq) {
    for (std::size_t n = 2; n < longer.size(); ++n) {
      for (std::size_t i = 0; i + n <= longer.size(); ++i) {
        Ngram sub(longer.begin() + static_cast<std::ptrdiff_t>(i), longer.begin() + static_cast<std::ptrdiff_t>(i + n));
        if (freq.count(sub)) containers[sub].insert(longer);
      }
    }
  }

  std::vector<CandidateScore> out;
  out.reserve(freq.size());
  for (const auto& [ngram, f] : freq) {
    CandidateScore c;
    c.ngram = ngram;
    c.frequency = f;
    const double len_weight = std::log2(static_cast<double>(ngram.size()));
    auto it = containers.find(ngram);
    if (it == containers.end()) {
      c.cvalue = len_weight * static_cast<double>(f);
    } else {
      double sum = 0.0;
      for (const auto& b : it->second) sum += static_cast<double>(freq.at(b));
      c.nested_in.assign(it->second.begin(), it->second.end());
      c.cvalue = len_weight * (static_cast<double>(f) - sum / static_cast<double>(it->second.size()));
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const CandidateScore& a, const CandidateScore& b) {
    if (a.cvalue != b.cvalue) return a.cvalue > b.cvalue;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.text() < b.text();
  });
  return out;
}

inline void write_candidate_report(std::ostream& out, const std::vector<CandidateScore>& ranked) {
  out << "ngram\tfrequency\tcvalue\n";
  char buf[64];
  for (const auto& c : ranked) {
    std::snprintf(buf, sizeof buf, "%.6f", c.cvalue);
    out << c.text() << '\t' << c.frequency << '\t' << buf << '\n';
  }
}

}  // namespace lexiforge::lexicon
