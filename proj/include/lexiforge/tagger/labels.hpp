#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexiforge/annotate/bio.hpp"
#include "lexiforge/error.hpp"
#include "lexiforge/text.hpp"

namespace lexiforge::tagger {

using annotate::BioLabel;

// O, the seven I- labels, then the seven B- labels; O is always index 0.
class LabelSet {
 public:
  LabelSet() {
    labels_.push_back(BioLabel::outside());
    for (auto c : kAllCategories) labels_.push_back(BioLabel::inside(c));
    for (auto c : kAllCategories) labels_.push_back(BioLabel::begin(c));
  }

  std::size_t size() const { return labels_.size(); }
  const BioLabel& operator[](std::size_t i) const { return labels_[i]; }

  std::size_t index(const BioLabel& l) const {
    if (l.tag == annotate::BioTag::O) return 0;
    const auto c = static_cast<std::size_t>(l.category);
    return l.tag == annotate::BioTag::I ? 1 + c : 1 + kAllCategories.size() + c;
  }

  std::vector<std::size_t> encode(const std::vector<BioLabel>& ls) const {
    std::vector<std::size_t> out;
    out.reserve(ls.size());
    for (const auto& l : ls) out.push_back(index(l));
    return out;
  }

  std::vector<BioLabel> decode(const std::vector<std::size_t>& ids) const {
    std::vector<BioLabel> out;
    out.reserve(ids.size());
    for (auto i : ids) out.push_back(labels_.at(i));
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& l : labels_) out.push_back(annotate::to_string(l));
    return out;
  }

 private:
  std::vector<BioLabel> labels_;
};

inline const LabelSet& default_labels() {
  static const LabelSet set;
  return set;
}

// Word ids over normalized tokens. 0 is padding, 1 the unknown word.
class Vocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;

  Vocab() : words_{"<pad>", "<unk>"} {}

  static Vocab build(const std::vector<std::vector<std::string>>& sentences, std::size_t min_freq = 3) {
    std::map<std::string, std::size_t> counts;
    for (const auto& s : sentences) {
      for (const auto& t : s) ++counts[key(t)];
    }
    Vocab v;
    v.min_freq_ = min_freq;
    for (const auto& [w, n] : counts) {
      if (n >= min_freq) v.add(w);
    }
    return v;
  }

  static Vocab from_words(const std::vector<std::string>& words, std::size_t min_freq) {
    if (words.size() < 2 || words[0] != "<pad>" || words[1] != "<unk>") {
      throw Error(ErrorCode::corrupt_state, "vocabulary must start with <pad>, <unk>");
    }
    Vocab v;
    v.min_freq_ = min_freq;
    for (std::size_t i = 2; i < words.size(); ++i) v.add(words[i]);
    return v;
  }

  static std::string key(const std::string& token) { return text::normalize_term(token); }

  std::size_t size() const { return words_.size(); }
  std::size_t min_freq() const { return min_freq_; }
  const std::vector<std::string>& words() const { return words_; }

  std::size_t id(const std::string& token) const {
    auto it = ids_.find(key(token));
    return it == ids_.end() ? kUnk : it->second;
  }

  std::vector<std::size_t> encode(const std::vector<std::string>& tokens) const {
    std::vector<std::size_t> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(id(t));
    return out;
  }

 private:
  void add(const std::string& w) {
    if (ids_.count(w)) return;
    ids_.emplace(w, words_.size());
    words_.push_back(w);
  }

  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::size_t min_freq_ = 3;
};

}  // namespace lexiforge::tagger
