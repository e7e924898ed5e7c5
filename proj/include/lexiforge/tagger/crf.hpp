#pragma once

// Linear-chain CRF over emission scores E (T x K). A path y scores
//   start[y_0] + sum_t E[t][y_t] + sum_t trans[y_{t-1}][y_t] + stop[y_{T-1}].

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "lexiforge/error.hpp"
#include "lexiforge/tagger/tensor.hpp"

namespace lexiforge::tagger {

template <class S>
struct CrfParams {
  Param<S> start, stop, trans;

  CrfParams() = default;
  explicit CrfParams(Eigen::Index k) : start("crf.start", 1, k), stop("crf.stop", 1, k), trans("crf.trans", k, k) {}

  Eigen::Index num_labels() const { return trans.value.rows(); }
  ParamList<S> params() { return {&start, &stop, &trans}; }
};

namespace detail {

template <class S, class Row>
S log_sum_exp(const Row& v) {
  const S m = v.maxCoeff();
  if (m == -std::numeric_limits<S>::infinity()) return m;
  return m + std::log((v.array() - m).exp().sum());
}

inline void check_labels(std::size_t t, std::size_t gold, Eigen::Index k) {
  if (gold >= static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::unknown_id, "label index " + std::to_string(gold) + " at position " + std::to_string(t));
  }
}

}  // namespace detail

// Forward recursion; row t of the result holds log alpha_t.
template <class S>
Matrix<S> crf_forward(const Matrix<S>& E, const CrfParams<S>& crf) {
  const auto T = E.rows(), K = E.cols();
  Matrix<S> alpha(T, K);
  alpha.row(0) = crf.start.value + E.row(0);
  RowVector<S> tmp(K);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index j = 0; j < K; ++j) {
      tmp = alpha.row(t - 1) + crf.trans.value.col(j).transpose();
      alpha(t, j) = detail::log_sum_exp<S>(tmp) + E(t, j);
    }
  }
  return alpha;
}

// Backward recursion; row t holds log beta_t (stop scores folded into the last row).
template <class S>
Matrix<S> crf_backward(const Matrix<S>& E, const CrfParams<S>& crf) {
  const auto T = E.rows(), K = E.cols();
  Matrix<S> beta(T, K);
  beta.row(T - 1) = crf.stop.value;
  RowVector<S> tmp(K);
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (Eigen::Index i = 0; i < K; ++i) {
      tmp = crf.trans.value.row(i) + E.row(t + 1) + beta.row(t + 1);
      beta(t, i) = detail::log_sum_exp<S>(tmp);
    }
  }
  return beta;
}

template <class S>
S crf_log_partition(const Matrix<S>& E, const CrfParams<S>& crf) {
  if (E.rows() == 0) return S(0);
  const Matrix<S> alpha = crf_forward(E, crf);
  const RowVector<S> last = alpha.row(E.rows() - 1) + crf.stop.value;
  return detail::log_sum_exp<S>(last);
}

template <class S>
S crf_path_score(const Matrix<S>& E, const CrfParams<S>& crf, const std::vector<std::size_t>& y) {
  if (static_cast<Eigen::Index>(y.size()) != E.rows()) {
    throw Error(ErrorCode::length_mismatch, "label sequence length differs from emissions");
  }
  if (y.empty()) return S(0);
  S s = crf.start.value(0, y[0]) + crf.stop.value(0, y.back());
  for (std::size_t t = 0; t < y.size(); ++t) {
    detail::check_labels(t, y[t], E.cols());
    s += E(t, y[t]);
    if (t > 0) s += crf.trans.value(y[t - 1], y[t]);
  }
  return s;
}

template <class S>
S crf_nll(const Matrix<S>& E, const CrfParams<S>& crf, const std::vector<std::size_t>& gold) {
  return crf_log_partition(E, crf) - crf_path_score(E, crf, gold);
}

// NLL plus gradients: writes d loss / d E into dE and accumulates the CRF
// parameter gradients.
template <class S>
S crf_nll_backward(const Matrix<S>& E, CrfParams<S>& crf, const std::vector<std::size_t>& gold, Matrix<S>& dE) {
  const auto T = E.rows(), K = E.cols();
  dE.setZero(T, K);
  if (T == 0) return S(0);
  const Matrix<S> alpha = crf_forward(E, crf);
  const Matrix<S> beta = crf_backward(E, crf);
  const RowVector<S> last = alpha.row(T - 1) + crf.stop.value;
  const S logZ = detail::log_sum_exp<S>(last);
  const S loss = logZ - crf_path_score(E, crf, gold);

  for (Eigen::Index t = 0; t < T; ++t) {
    dE.row(t) = (alpha.row(t) + beta.row(t)).array() - logZ;
    dE.row(t) = dE.row(t).array().exp();
  }
  crf.start.grad += dE.row(0);
  crf.stop.grad += dE.row(T - 1);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index i = 0; i < K; ++i) {
      for (Eigen::Index j = 0; j < K; ++j) {
        crf.trans.grad(i, j) += std::exp(alpha(t - 1, i) + crf.trans.value(i, j) + E(t, j) + beta(t, j) - logZ);
      }
    }
  }
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto g = static_cast<Eigen::Index>(gold[t]);
    dE(t, g) -= S(1);
    if (t > 0) crf.trans.grad(static_cast<Eigen::Index>(gold[t - 1]), g) -= S(1);
  }
  crf.start.grad(0, static_cast<Eigen::Index>(gold[0])) -= S(1);
  crf.stop.grad(0, static_cast<Eigen::Index>(gold[T - 1])) -= S(1);
  return loss;
}

template <class S>
struct ViterbiResult {
  std::vector<std::size_t> path;
  S score{};
};

// Max-score path. Ties go to the smallest label index at each backtracking
// step, so among optimal paths the result is the one whose label sequence,
// read from the end, is lexicographically smallest.
template <class S>
ViterbiResult<S> viterbi_decode(const Matrix<S>& E, const CrfParams<S>& crf) {
  const auto T = E.rows(), K = E.cols();
  ViterbiResult<S> out;
  if (T == 0) return out;
  Matrix<S> delta(T, K);
  std::vector<std::vector<Eigen::Index>> back(static_cast<std::size_t>(T), std::vector<Eigen::Index>(K, 0));
  delta.row(0) = crf.start.value + E.row(0);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index j = 0; j < K; ++j) {
      Eigen::Index best = 0;
      S best_score = delta(t - 1, 0) + crf.trans.value(0, j);
      for (Eigen::Index i = 1; i < K; ++i) {
        const S s = delta(t - 1, i) + crf.trans.value(i, j);
        if (s > best_score) {
          best_score = s;
          best = i;
        }
      }
      delta(t, j) = best_score + E(t, j);
      back[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] = best;
    }
  }
  Eigen::Index best = 0;
  S best_score = delta(T - 1, 0) + crf.stop.value(0, 0);
  for (Eigen::Index j = 1; j < K; ++j) {
    const S s = delta(T - 1, j) + crf.stop.value(0, j);
    if (s > best_score) {
      best_score = s;
      best = j;
    }
  }
  out.score = best_score;
  out.path.resize(static_cast<std::size_t>(T));
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    out.path[static_cast<std::size_t>(t)] = static_cast<std::size_t>(best);
    if (t > 0) best = back[static_cast<std::size_t>(t)][static_cast<std::size_t>(best)];
  }
  return out;
}

// Mean token NLL of the log-softmax of each emission row; writes d loss / d E.
template <class S>
S log_softmax_nll(const Matrix<S>& E, const std::vector<std::size_t>& gold, Matrix<S>* dE = nullptr) {
  const auto T = E.rows();
  if (static_cast<Eigen::Index>(gold.size()) != T) {
    throw Error(ErrorCode::length_mismatch, "gold length differs from emissions");
  }
  if (dE) dE->setZero(T, E.cols());
  if (T == 0) return S(0);
  S loss = 0;
  for (Eigen::Index t = 0; t < T; ++t) {
    detail::check_labels(static_cast<std::size_t>(t), gold[t], E.cols());
    const RowVector<S> row = E.row(t);
    const S lse = detail::log_sum_exp<S>(row);
    loss += lse - E(t, static_cast<Eigen::Index>(gold[t]));
    if (dE) {
      dE->row(t) = (row.array() - lse).exp();
      (*dE)(t, static_cast<Eigen::Index>(gold[t])) -= S(1);
    }
  }
  if (dE) *dE /= static_cast<S>(T);
  return loss / static_cast<S>(T);
}

template <class S>
std::vector<std::size_t> argmax_rows(const Matrix<S>& E) {
  std::vector<std::size_t> out(static_cast<std::size_t>(E.rows()));
  for (Eigen::Index t = 0; t < E.rows(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < E.cols(); ++k) {
      if (E(t, k) > E(t, best)) best = k;
    }
    out[static_cast<std::size_t>(t)] = static_cast<std::size_t>(best);
  }
  return out;
}

}  // namespace lexiforge::tagger
