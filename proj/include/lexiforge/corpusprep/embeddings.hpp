#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexiforge/error.hpp"
#include "lexiforge/text.hpp"

namespace lexiforge::corpusprep {

using Vector = std::vector<double>;

enum class UnkPolicy { skip, zero };

class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dim, UnkPolicy policy = UnkPolicy::skip) : dim_(dim), policy_(policy) {
    if (dim == 0) throw Error(ErrorCode::dimension_mismatch, "embedding dimension must be positive");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  UnkPolicy unk_policy() const { return policy_; }
  void set_unk_policy(UnkPolicy p) { policy_ = p; }
  std::size_t duplicate_count() const { return duplicates_; }

  void set(const std::string& word, Vector v) {
    if (v.size() != dim_) throw Error(ErrorCode::dimension_mismatch, "vector for '" + word + "' has wrong length");
    for (double x : v) {
      if (!std::isfinite(x)) throw Error(ErrorCode::malformed, "non-finite component for '" + word + "'");
    }
    auto [it, inserted] = vectors_.insert_or_assign(word, std::move(v));
    if (!inserted) ++duplicates_;
  }

  const Vector* find(std::string_view word) const {
    auto it = vectors_.find(std::string(word));
    return it == vectors_.end() ? nullptr : &it->second;
  }

  // Exact form first, then the normalized token.
  const Vector* lookup(std::string_view token) const {
    if (const auto* v = find(token)) return v;
    return find(text::normalize_term(token));
  }

 private:
  std::size_t dim_ = 1;
  UnkPolicy policy_ = UnkPolicy::skip;
  std::unordered_map<std::string, Vector> vectors_;
  std::size_t duplicates_ = 0;
};

// Text format: header `vocab_size dim`, then `word v1 ... v_dim` per line.
inline EmbeddingStore load_embeddings(std::istream& in, UnkPolicy policy = UnkPolicy::skip) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse, "empty embedding file");
  std::istringstream header(line);
  std::size_t vocab = 0, dim = 0;
  if (!(header >> vocab >> dim) || dim == 0) throw Error(ErrorCode::parse, "row 1: expected 'vocab_size dim'");
  EmbeddingStore store(dim, policy);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    Vector v;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::parse, "row " + std::to_string(row) + ": bad number '" + tok + "'");
      }
    }
    if (v.size() != dim) {
      throw Error(ErrorCode::dimension_mismatch, "row " + std::to_string(row) + ": expected " + std::to_string(dim) +
                                                     " components, got " + std::to_string(v.size()));
    }
    store.set(word, std::move(v));
  }
  return store;
}

inline EmbeddingStore load_embeddings_file(const std::string& path, UnkPolicy policy = UnkPolicy::skip) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open embeddings '" + path + "'");
  return load_embeddings(in, policy);
}

// Mean of token vectors. OOV tokens are ignored (skip) or count as zero
// vectors (zero); no in-vocabulary token yields the zero vector.
inline Vector phrase_vector(std::span<const std::string> tokens, const EmbeddingStore& store) {
  Vector sum(store.dim(), 0.0);
  std::size_t n = 0;
  for (const auto& tok : tokens) {
    const auto* v = store.lookup(tok);
    if (v == nullptr) {
      if (store.unk_policy() == UnkPolicy::zero) ++n;
      continue;
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++n;
  }
  if (n == 0) return sum;
  for (auto& x : sum) x /= static_cast<double>(n);
  return sum;
}

inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::length_mismatch,
                "cosine of vectors of length " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  // Canonical argument order makes the result exactly symmetric even when
  // the compiler contracts the sums into fused multiply-adds.
  if (std::lexicographical_compare(v.begin(), v.end(), u.begin(), u.end())) std::swap(u, v);
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

}  // namespace lexiforge::corpusprep
