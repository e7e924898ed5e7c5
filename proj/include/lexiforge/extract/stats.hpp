#pragma once

#include <map>
#include <set>
#include <vector>

#include "lexiforge/eval/report.hpp"
#include "lexiforge/extract/review.hpp"

namespace lexiforge::extract {

// One cell per (model, scheme). Each candidate counts once with its latest
// verdict. When the candidate list is given, undecided candidates count in
// `generated` only; otherwise `generated` is the number of decided ones.
inline std::vector<eval::AcceptanceCell> acceptance_stats(const std::vector<ReviewDecision>& log,
                                                          const std::vector<CandidateTerm>* candidates = nullptr) {
  std::map<std::pair<std::string, int>, eval::AcceptanceCell> cells;
  auto cell = [&](const std::string& model, int scheme) -> eval::AcceptanceCell& {
    auto& c = cells[{model, scheme}];
    c.model_id = model;
    c.scheme_id = scheme;
    return c;
  };
  const auto latest = latest_decisions(log);
  std::set<CandidateKey> counted;
  if (candidates) {
    for (const auto& c : *candidates) {
      if (counted.insert(key_of(c)).second) ++cell(c.model_id, c.scheme_id).generated;
    }
  }
  for (const auto& [key, d] : latest) {
    auto& c = cell(d.model_id, d.scheme_id);
    if (counted.insert(key).second) ++c.generated;
    switch (d.verdict) {
      case Verdict::accepted: ++c.accepted; break;
      case Verdict::rejected: ++c.rejected; break;
      case Verdict::deferred: ++c.deferred; break;
    }
  }
  std::vector<eval::AcceptanceCell> out;
  for (auto& [_, c] : cells) out.push_back(std::move(c));
  return out;
}

}  // namespace lexiforge::extract
