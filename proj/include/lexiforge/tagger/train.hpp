#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "lexiforge/eval/metrics.hpp"
#include "lexiforge/tagger/model.hpp"

namespace lexiforge::tagger {

template <class S>
class Adam {
 public:
  Adam(ParamList<S> params, const TrainConfig& tc) : params_(std::move(params)), tc_(tc) {
    for (auto* p : params_) {
      m_.push_back(Matrix<S>::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix<S>::Zero(p->value.rows(), p->value.cols()));
    }
  }

  void step() {
    ++t_;
    const S b1 = static_cast<S>(tc_.beta1), b2 = static_cast<S>(tc_.beta2);
    const S c1 = S(1) - static_cast<S>(std::pow(tc_.beta1, static_cast<double>(t_)));
    const S c2 = S(1) - static_cast<S>(std::pow(tc_.beta2, static_cast<double>(t_)));
    const S lr = static_cast<S>(tc_.learning_rate), eps = static_cast<S>(tc_.adam_eps);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& g = params_[i]->grad;
      m_[i] = b1 * m_[i] + (S(1) - b1) * g;
      v_[i] = b2 * v_[i] + (S(1) - b2) * g.cwiseAbs2();
      params_[i]->value.array() -= lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps);
    }
  }

 private:
  ParamList<S> params_;
  TrainConfig tc_;
  std::vector<Matrix<S>> m_, v_;
  std::size_t t_ = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0;
  eval::Prf dev;  // entity level; zeros without a dev set
};

template <class S>
struct TrainResult {
  TaggerModel<S> model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

template <class S>
eval::SequenceScores evaluate(const TaggerModel<S>& model, const std::vector<Example>& data) {
  std::vector<std::vector<std::string>> sentences;
  for (const auto& e : data) sentences.push_back(e.tokens);
  const auto pred = model.predict_ids(sentences);
  eval::SequenceScores scores;
  for (std::size_t i = 0; i < data.size(); ++i) {
    scores.add(model.labels().decode(pred[i]), model.labels().decode(data[i].gold));
  }
  return scores;
}

// Mini-batch Adam on the model's loss with early stopping on dev entity-F1;
// the returned model holds the parameters of the best dev epoch.
template <class S>
TrainResult<S> train(ModelKind kind, const std::vector<Example>& train_set, const std::vector<Example>& dev_set,
                     const TrainConfig& tc, const CnnConfig& cnn = {},
                     const std::function<void(const EpochRecord&)>& on_epoch = {}) {
  tc.validate();
  if (train_set.empty()) throw Error(ErrorCode::empty_train_set, "no training sentences");
  TrainResult<S> result;
  result.model = TaggerModel<S>::create(kind, train_set, cnn, tc);
  auto& model = result.model;

  std::vector<typename TaggerModel<S>::Prepared> prepared;
  prepared.reserve(train_set.size());
  for (const auto& e : train_set) {
    if (e.gold.size() != e.tokens.size()) throw Error(ErrorCode::length_mismatch, "training sentence without labels");
    prepared.push_back(model.prepare(e));
  }

  Adam<S> adam(model.params(), tc);
  Rng shuffle_rng(derive_seed(tc.seed, "shuffle"));
  Rng dropout_rng(derive_seed(tc.seed, "dropout"));
  std::vector<std::size_t> order(prepared.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<Matrix<S>> best;
  double best_f1 = -1;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    double loss_sum = 0;
    for (std::size_t b = 0; b < order.size(); b += tc.batch_size) {
      std::vector<const typename TaggerModel<S>::Prepared*> batch;
      for (std::size_t i = b; i < std::min(order.size(), b + tc.batch_size); ++i) batch.push_back(&prepared[order[i]]);
      model.zero_grad();
      const S loss = model.loss_and_grad(batch, Mode::train, &dropout_rng);
      if (!std::isfinite(static_cast<double>(loss))) {
        throw Error(ErrorCode::divergence, "loss became " + std::to_string(static_cast<double>(loss)) + " in epoch " +
                                               std::to_string(epoch) + " at batch " +
                                               std::to_string(b / tc.batch_size));
      }
      loss_sum += static_cast<double>(loss) * static_cast<double>(batch.size());
      adam.step();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    if (!dev_set.empty()) rec.dev = evaluate(model, dev_set).at(eval::Level::entity);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (dev_set.empty()) {
      result.best_epoch = epoch;
      continue;
    }
    if (rec.dev.f1 > best_f1) {
      best_f1 = rec.dev.f1;
      result.best_epoch = epoch;
      stale = 0;
      best.clear();
      for (auto* p : model.params()) best.push_back(p->value);
    } else if (++stale >= tc.patience) {
      break;
    }
  }
  if (!best.empty()) {
    auto ps = model.params();
    for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->value = best[i];
  }
  return result;
}

}  // namespace lexiforge::tagger
