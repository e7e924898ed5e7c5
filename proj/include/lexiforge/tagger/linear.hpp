#pragma once

// Sparse-feature emission scorer: E[t][k] = sum over features f firing at
// token t of W[f][k].

#include <string>
#include <unordered_map>
#include <vector>

#include "lexiforge/tagger/tensor.hpp"
#include "lexiforge/text.hpp"

namespace lexiforge::tagger {

// Leading/trailing n code points (whole string when shorter).
inline std::string utf8_prefix(const std::string& s, std::size_t n) {
  const auto cps = text::code_points(s);
  if (cps.size() <= n) return s;
  return s.substr(0, cps[n].begin);
}

inline std::string utf8_suffix(const std::string& s, std::size_t n) {
  const auto cps = text::code_points(s);
  if (cps.size() <= n) return s;
  return s.substr(cps[cps.size() - n].begin);
}

// Feature strings of token t: identity, lowercase, prefixes/suffixes up to 3,
// capitalization, digit, the identities of the +-2 window, and a bias.
inline std::vector<std::string> token_features(const std::vector<std::string>& tokens, std::size_t t) {
  const std::string& w = tokens[t];
  std::vector<std::string> f;
  f.reserve(18);
  f.push_back("bias");
  f.push_back("w=" + w);
  const std::string lower = text::fold(w);
  f.push_back("lw=" + lower);
  for (std::size_t n = 1; n <= 3; ++n) {
    f.push_back("p" + std::to_string(n) + "=" + utf8_prefix(lower, n));
    f.push_back("s" + std::to_string(n) + "=" + utf8_suffix(lower, n));
  }
  const auto cps = text::code_points(w);
  if (!cps.empty() && text::is_upper(cps.front().value)) f.push_back("cap");
  for (const auto& cp : cps) {
    if (text::is_digit(cp.value)) {
      f.push_back("digit");
      break;
    }
  }
  for (int d = -2; d <= 2; ++d) {
    if (d == 0) continue;
    const auto j = static_cast<std::ptrdiff_t>(t) + d;
    const std::string key = "w[" + std::to_string(d) + "]=";
    if (j < 0) {
      f.push_back(key + "<s>");
    } else if (j >= static_cast<std::ptrdiff_t>(tokens.size())) {
      f.push_back(key + "</s>");
    } else {
      f.push_back(key + text::fold(tokens[static_cast<std::size_t>(j)]));
    }
  }
  return f;
}

using FeatureIds = std::vector<std::vector<std::size_t>>;  // per token

class FeatureIndex {
 public:
  static FeatureIndex build(const std::vector<std::vector<std::string>>& sentences) {
    FeatureIndex idx;
    for (const auto& s : sentences) {
      for (std::size_t t = 0; t < s.size(); ++t) {
        for (auto& f : token_features(s, t)) idx.add(std::move(f));
      }
    }
    return idx;
  }

  static FeatureIndex from_names(const std::vector<std::string>& names) {
    FeatureIndex idx;
    for (const auto& n : names) idx.add(n);
    return idx;
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  // Unseen features are dropped.
  FeatureIds extract(const std::vector<std::string>& tokens) const {
    FeatureIds out(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      for (const auto& f : token_features(tokens, t)) {
        auto it = ids_.find(f);
        if (it != ids_.end()) out[t].push_back(it->second);
      }
    }
    return out;
  }

 private:
  void add(std::string f) {
    if (ids_.count(f)) return;
    ids_.emplace(f, names_.size());
    names_.push_back(std::move(f));
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> ids_;
};

template <class S>
Matrix<S> linear_emissions(const FeatureIds& feats, const Param<S>& W) {
  Matrix<S> E = Matrix<S>::Zero(static_cast<Eigen::Index>(feats.size()), W.value.cols());
  for (std::size_t t = 0; t < feats.size(); ++t) {
    for (auto f : feats[t]) E.row(static_cast<Eigen::Index>(t)) += W.value.row(static_cast<Eigen::Index>(f));
  }
  return E;
}

template <class S>
void linear_backward(const FeatureIds& feats, const Matrix<S>& dE, Param<S>& W) {
  for (std::size_t t = 0; t < feats.size(); ++t) {
    for (auto f : feats[t]) W.grad.row(static_cast<Eigen::Index>(f)) += dE.row(static_cast<Eigen::Index>(t));
  }
}

}  // namespace lexiforge::tagger
