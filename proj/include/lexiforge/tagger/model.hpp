#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexiforge/error.hpp"
#include "lexiforge/rng.hpp"
#include "lexiforge/tagger/cnn.hpp"
#include "lexiforge/tagger/crf.hpp"
#include "lexiforge/tagger/labels.hpp"
#include "lexiforge/tagger/linear.hpp"

namespace lexiforge::tagger {

enum class ModelKind { cnn, cnn_crf, linear_crf };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::cnn: return "cnn";
    case ModelKind::cnn_crf: return "cnn-crf";
    case ModelKind::linear_crf: return "linear-crf";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "cnn") return ModelKind::cnn;
  if (s == "cnn-crf" || s == "cnn_crf") return ModelKind::cnn_crf;
  if (s == "linear-crf" || s == "linear_crf") return ModelKind::linear_crf;
  throw Error(ErrorCode::config, "unknown model kind '" + std::string(s) + "' (cnn, cnn-crf, linear-crf)");
}

inline bool uses_cnn(ModelKind k) { return k != ModelKind::linear_crf; }
inline bool uses_crf(ModelKind k) { return k != ModelKind::cnn; }

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 10;
  std::size_t patience = 2;
  std::uint64_t seed = 0;
  std::size_t min_freq = 3;
  double init_scale = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    if (!(learning_rate > 0) || batch_size == 0 || max_epochs == 0 || min_freq == 0 || !(init_scale >= 0)) {
      throw Error(ErrorCode::config, "training rates and sizes must be positive");
    }
  }
};

// A tokenized training or evaluation sentence.
struct Example {
  std::vector<std::string> tokens;
  std::vector<std::size_t> gold;  // label indices; empty when unlabeled
};

template <class S>
class TaggerModel {
 public:
  // Model input derived once per sentence.
  struct Prepared {
    std::vector<std::size_t> ids;
    FeatureIds feats;
    std::vector<std::size_t> gold;
    std::size_t size() const { return gold.size(); }
  };

  TaggerModel() = default;

  // Builds vocabulary / feature index from the training tokens only and
  // initializes parameters.
  static TaggerModel create(ModelKind kind, const std::vector<Example>& train, const CnnConfig& cnn,
                            const TrainConfig& tc) {
    TaggerModel m;
    m.kind_ = kind;
    m.cnn_config_ = cnn;
    m.train_config_ = tc;
    std::vector<std::vector<std::string>> sentences;
    for (const auto& e : train) sentences.push_back(e.tokens);
    const auto K = static_cast<Eigen::Index>(m.labels_.size());
    if (uses_cnn(kind)) {
      m.vocab_ = Vocab::build(sentences, tc.min_freq);
      m.cnn_ = Cnn<S>(cnn, m.vocab_.size(), m.labels_.size());
      Rng rng(derive_seed(tc.seed, "init"));
      m.cnn_.params().init_uniform(rng, tc.init_scale);
    } else {
      m.features_ = FeatureIndex::build(sentences);
      m.linear_w_ = Param<S>("linear.w", static_cast<Eigen::Index>(m.features_.size()), K);
    }
    if (uses_crf(kind)) m.crf_ = CrfParams<S>(K);
    return m;
  }

  // Shell with the given symbol tables and zero parameters (used by loaders).
  static TaggerModel empty(ModelKind kind, Vocab vocab, FeatureIndex features, const CnnConfig& cnn,
                           const TrainConfig& tc) {
    TaggerModel m;
    m.kind_ = kind;
    m.cnn_config_ = cnn;
    m.train_config_ = tc;
    m.vocab_ = std::move(vocab);
    m.features_ = std::move(features);
    const auto K = static_cast<Eigen::Index>(m.labels_.size());
    if (uses_cnn(kind)) m.cnn_ = Cnn<S>(cnn, m.vocab_.size(), m.labels_.size());
    else m.linear_w_ = Param<S>("linear.w", static_cast<Eigen::Index>(m.features_.size()), K);
    if (uses_crf(kind)) m.crf_ = CrfParams<S>(K);
    return m;
  }

  ModelKind kind() const { return kind_; }
  const LabelSet& labels() const { return labels_; }
  const Vocab& vocab() const { return vocab_; }
  const FeatureIndex& features() const { return features_; }
  const CnnConfig& cnn_config() const { return cnn_config_; }
  const TrainConfig& train_config() const { return train_config_; }
  Cnn<S>& cnn() { return cnn_; }
  CrfParams<S>& crf() { return crf_; }

  ParamList<S> params() {
    ParamList<S> out;
    if (uses_cnn(kind_)) out = cnn_.params().params();
    else out.push_back(&linear_w_);
    if (uses_crf(kind_)) {
      for (auto* p : crf_.params()) out.push_back(p);
    }
    return out;
  }

  void zero_grad() {
    for (auto* p : params()) p->zero_grad();
  }

  Prepared prepare(const Example& e) const {
    Prepared p;
    if (uses_cnn(kind_)) p.ids = vocab_.encode(e.tokens);
    else p.feats = features_.extract(e.tokens);
    p.gold = e.gold;
    if (p.gold.empty()) p.gold.assign(e.tokens.size(), 0);
    if (p.gold.size() != e.tokens.size()) throw Error(ErrorCode::length_mismatch, "gold labels differ from tokens");
    return p;
  }

  // Emission scores for each sentence of the batch.
  std::vector<Matrix<S>> emissions(const std::vector<const Prepared*>& batch, Mode mode, Rng* rng,
                                   CnnCache<S>* cache = nullptr) const {
    std::vector<Matrix<S>> out;
    if (uses_cnn(kind_)) {
      CnnCache<S> local;
      CnnCache<S>& c = cache ? *cache : local;
      std::vector<std::vector<std::size_t>> ids;
      for (const auto* p : batch) ids.push_back(p->ids);
      cnn_.forward(ids, mode, rng, c);
      for (std::size_t i = 0; i < batch.size(); ++i) out.push_back(Cnn<S>::slice(c, i));
    } else {
      for (const auto* p : batch) out.push_back(linear_emissions(p->feats, linear_w_));
    }
    return out;
  }

  // Mean per-sentence loss of the batch; accumulates gradients of that mean.
  S loss_and_grad(const std::vector<const Prepared*>& batch, Mode mode, Rng* rng) {
    if (batch.empty()) return S(0);
    CnnCache<S> cache;
    const auto E = emissions(batch, mode, rng, &cache);
    const S scale = S(1) / static_cast<S>(batch.size());

    // CRF gradients are accumulated per sentence, then scaled to the mean.
    std::vector<Matrix<S>> saved;
    if (uses_crf(kind_)) {
      for (auto* p : crf_.params()) {
        saved.push_back(p->grad);
        p->grad.setZero();
      }
    }
    S total = 0;
    Matrix<S> dpacked;
    if (uses_cnn(kind_)) dpacked = Matrix<S>::Zero(cache.logits.rows(), cache.logits.cols());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Matrix<S> dE;
      total += uses_crf(kind_) ? crf_nll_backward(E[i], crf_, batch[i]->gold, dE)
                               : log_softmax_nll(E[i], batch[i]->gold, &dE);
      dE *= scale;
      if (uses_cnn(kind_)) {
        dpacked.middleRows(static_cast<Eigen::Index>(cache.packing.offsets[i]), dE.rows()) = dE;
      } else {
        linear_backward(batch[i]->feats, dE, linear_w_);
      }
    }
    if (uses_crf(kind_)) {
      auto ps = crf_.params();
      for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->grad = saved[i] + scale * ps[i]->grad;
    }
    if (uses_cnn(kind_)) cnn_.backward(cache, dpacked);
    return total * scale;
  }

  // Loss without gradients (eval mode); `cache` receives the CNN activations.
  S loss(const std::vector<const Prepared*>& batch, CnnCache<S>* cache = nullptr) const {
    if (batch.empty()) return S(0);
    const auto E = emissions(batch, Mode::eval, nullptr, cache);
    S total = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      total += uses_crf(kind_) ? crf_nll(E[i], crf_, batch[i]->gold) : log_softmax_nll(E[i], batch[i]->gold);
    }
    return total / static_cast<S>(batch.size());
  }

  std::vector<std::size_t> decode(const Matrix<S>& E) const {
    return uses_crf(kind_) ? viterbi_decode(E, crf_).path : argmax_rows(E);
  }

  // Label indices per sentence; empty sentences give empty sequences.
  std::vector<std::vector<std::size_t>> predict_ids(const std::vector<std::vector<std::string>>& sentences,
                                                    std::size_t chunk = 64) const {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(sentences.size());
    for (std::size_t b = 0; b < sentences.size(); b += chunk) {
      std::vector<Prepared> prepared;
      const std::size_t e = std::min(sentences.size(), b + chunk);
      for (std::size_t i = b; i < e; ++i) prepared.push_back(prepare({sentences[i], {}}));
      std::vector<const Prepared*> batch;
      for (const auto& p : prepared) batch.push_back(&p);
      const auto E = emissions(batch, Mode::eval, nullptr);
      for (const auto& m : E) out.push_back(decode(m));
    }
    return out;
  }

  std::vector<std::vector<BioLabel>> predict(const std::vector<std::vector<std::string>>& sentences) const {
    std::vector<std::vector<BioLabel>> out;
    for (const auto& ids : predict_ids(sentences)) out.push_back(labels_.decode(ids));
    return out;
  }

 private:
  ModelKind kind_ = ModelKind::linear_crf;
  LabelSet labels_;
  Vocab vocab_;
  FeatureIndex features_;
  CnnConfig cnn_config_;
  TrainConfig train_config_;
  Cnn<S> cnn_;
  Param<S> linear_w_;
  CrfParams<S> crf_;
};

}  // namespace lexiforge::tagger
