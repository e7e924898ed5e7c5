#pragma once

// Convolutional emission scorer:
//   embeddings -> [conv k=3 | conv k=5] (ReLU, concatenated)
//              -> deep_layers x conv k=5 (ReLU, dropout) -> affine to K labels.
// All convolutions are same-padded, so every layer keeps one row per token.
//
// Several sentences are processed as one packed matrix: sentences are stacked
// with `gap` all-zero separator rows between them (gap >= the widest
// half-kernel), and separator rows are re-zeroed after every layer, so no
// sentence sees another one and GEMMs stay large.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lexiforge/error.hpp"
#include "lexiforge/rng.hpp"
#include "lexiforge/tagger/tensor.hpp"

namespace lexiforge::tagger {

struct CnnConfig {
  std::size_t embed_dim = 300;
  std::size_t kernel_a = 3;
  std::size_t kernel_b = 5;
  std::size_t parallel_channels = 128;
  std::size_t deep_layers = 3;
  std::size_t deep_channels = 256;
  std::size_t deep_kernel = 5;
  double dropout = 0.5;

  void validate() const {
    if (embed_dim == 0 || parallel_channels == 0 || deep_channels == 0 || kernel_a == 0 || kernel_b == 0 ||
        deep_kernel == 0) {
      throw Error(ErrorCode::config, "CNN dimensions must be positive");
    }
    if (kernel_a % 2 == 0 || kernel_b % 2 == 0 || deep_kernel % 2 == 0) {
      throw Error(ErrorCode::config, "same-padding needs odd kernel sizes");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(ErrorCode::config, "dropout must be in [0,1)");
  }

  std::size_t gap() const { return std::max({kernel_a, kernel_b, deep_kernel}) / 2; }
};

enum class Mode { train, eval };

template <class S>
struct CnnParams {
  Param<S> embed, conv_a_w, conv_a_b, conv_b_w, conv_b_b;
  std::vector<Param<S>> deep_w, deep_b;
  Param<S> out_w, out_b;

  CnnParams() = default;
  CnnParams(const CnnConfig& c, std::size_t vocab, std::size_t labels) {
    c.validate();
    const auto D = static_cast<Eigen::Index>(c.embed_dim);
    const auto P = static_cast<Eigen::Index>(c.parallel_channels);
    const auto H = static_cast<Eigen::Index>(c.deep_channels);
    embed = Param<S>("cnn.embed", static_cast<Eigen::Index>(vocab), D);
    conv_a_w = Param<S>("cnn.conv_a.w", static_cast<Eigen::Index>(c.kernel_a) * D, P);
    conv_a_b = Param<S>("cnn.conv_a.b", 1, P);
    conv_b_w = Param<S>("cnn.conv_b.w", static_cast<Eigen::Index>(c.kernel_b) * D, P);
    conv_b_b = Param<S>("cnn.conv_b.b", 1, P);
    Eigen::Index in = 2 * P;
    for (std::size_t i = 0; i < c.deep_layers; ++i) {
      deep_w.emplace_back("cnn.deep" + std::to_string(i) + ".w", static_cast<Eigen::Index>(c.deep_kernel) * in, H);
      deep_b.emplace_back("cnn.deep" + std::to_string(i) + ".b", 1, H);
      in = H;
    }
    out_w = Param<S>("cnn.out.w", in, static_cast<Eigen::Index>(labels));
    out_b = Param<S>("cnn.out.b", 1, static_cast<Eigen::Index>(labels));
  }

  ParamList<S> params() {
    ParamList<S> out = {&embed, &conv_a_w, &conv_a_b, &conv_b_w, &conv_b_b};
    for (std::size_t i = 0; i < deep_w.size(); ++i) {
      out.push_back(&deep_w[i]);
      out.push_back(&deep_b[i]);
    }
    out.push_back(&out_w);
    out.push_back(&out_b);
    return out;
  }

  // Uniform(-scale, scale) for embeddings, convolution and output weights;
  // zero biases.
  void init_uniform(Rng& rng, double scale = 0.1) {
    for (auto* p : params()) {
      if (p->name.size() > 2 && p->name.compare(p->name.size() - 2, 2, ".b") == 0) {
        p->value.setZero();
        continue;
      }
      for (Eigen::Index i = 0; i < p->value.size(); ++i) {
        p->value.data()[i] = static_cast<S>((2.0 * uniform_unit(rng) - 1.0) * scale);
      }
    }
  }
};

// Row layout of a packed batch.
struct Packing {
  std::vector<std::size_t> offsets;  // first row of each sentence
  std::vector<std::size_t> lengths;
  std::size_t rows = 0;

  static Packing of(const std::vector<std::size_t>& lengths, std::size_t gap) {
    Packing p;
    p.lengths = lengths;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (i) p.rows += gap;
      p.offsets.push_back(p.rows);
      p.rows += lengths[i];
    }
    return p;
  }
};

namespace detail {

// im2col for a same-padded 1-D convolution: row r of the result is the
// concatenation of X rows r-h .. r+h (zeros outside the matrix).
template <class S>
Matrix<S> im2col(const Matrix<S>& X, std::size_t kernel) {
  const auto R = X.rows(), C = X.cols();
  const auto k = static_cast<Eigen::Index>(kernel), h = k / 2;
  Matrix<S> out = Matrix<S>::Zero(R, k * C);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index shift = j - h;
    const Eigen::Index lo = std::max<Eigen::Index>(0, -shift), hi = std::min<Eigen::Index>(R, R - shift);
    if (hi > lo) out.block(lo, j * C, hi - lo, C) = X.middleRows(lo + shift, hi - lo);
  }
  return out;
}

template <class S>
void col2im_add(const Matrix<S>& dXc, std::size_t kernel, Matrix<S>& dX) {
  const auto R = dX.rows(), C = dX.cols();
  const auto k = static_cast<Eigen::Index>(kernel), h = k / 2;
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index shift = j - h;
    const Eigen::Index lo = std::max<Eigen::Index>(0, -shift), hi = std::min<Eigen::Index>(R, R - shift);
    if (hi > lo) dX.middleRows(lo + shift, hi - lo) += dXc.block(lo, j * C, hi - lo, C);
  }
}

}  // namespace detail

// Activations kept for the backward pass.
template <class S>
struct CnnCache {
  Packing packing;
  std::vector<std::size_t> ids;   // per row; separators hold Vocab::kPad
  Eigen::Matrix<S, Eigen::Dynamic, 1> mask;  // 1 on token rows, 0 on separators
  Matrix<S> col_a, col_b;         // im2col of the embeddings
  Matrix<S> act_a, act_b;         // ReLU outputs of the parallel convolutions
  std::vector<Matrix<S>> deep_col, deep_act, deep_drop;
  Matrix<S> hidden;               // input of the output layer
  Matrix<S> logits;
};

template <class S>
class Cnn {
 public:
  Cnn() = default;
  Cnn(const CnnConfig& config, std::size_t vocab, std::size_t labels)
      : config_(config), params_(config, vocab, labels) {}

  const CnnConfig& config() const { return config_; }
  CnnParams<S>& params() { return params_; }
  const CnnParams<S>& params() const { return params_; }

  // Emission scores for every sentence of `batch`, packed as rows of
  // cache.logits (see cache.packing). `rng` is required in train mode.
  void forward(const std::vector<std::vector<std::size_t>>& batch, Mode mode, Rng* rng, CnnCache<S>& c) const {
    std::vector<std::size_t> lengths;
    for (const auto& s : batch) lengths.push_back(s.size());
    c.packing = Packing::of(lengths, config_.gap());
    const auto R = static_cast<Eigen::Index>(c.packing.rows);
    const auto V = static_cast<std::size_t>(params_.embed.value.rows());
    c.ids.assign(c.packing.rows, 0);
    c.mask = Eigen::Matrix<S, Eigen::Dynamic, 1>::Zero(R);
    Matrix<S> X = Matrix<S>::Zero(R, params_.embed.value.cols());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      for (std::size_t t = 0; t < batch[i].size(); ++t) {
        const auto id = batch[i][t];
        if (id >= V) throw Error(ErrorCode::unknown_id, "token id " + std::to_string(id) + " >= vocabulary size");
        const auto r = c.packing.offsets[i] + t;
        c.ids[r] = id;
        c.mask(static_cast<Eigen::Index>(r)) = S(1);
        X.row(static_cast<Eigen::Index>(r)) = params_.embed.value.row(static_cast<Eigen::Index>(id));
      }
    }

    c.col_a = detail::im2col(X, config_.kernel_a);
    c.col_b = detail::im2col(X, config_.kernel_b);
    c.act_a = activate(c.col_a, params_.conv_a_w, params_.conv_a_b, c.mask);
    c.act_b = activate(c.col_b, params_.conv_b_w, params_.conv_b_b, c.mask);
    Matrix<S> H(R, c.act_a.cols() + c.act_b.cols());
    H << c.act_a, c.act_b;

    const std::size_t L = params_.deep_w.size();
    c.deep_col.resize(L);
    c.deep_act.resize(L);
    c.deep_drop.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      c.deep_col[l] = detail::im2col(H, config_.deep_kernel);
      c.deep_act[l] = activate(c.deep_col[l], params_.deep_w[l], params_.deep_b[l], c.mask);
      if (mode == Mode::train && config_.dropout > 0.0) {
        if (!rng) throw Error(ErrorCode::config, "train-mode forward needs an rng");
        const S keep = static_cast<S>(1.0 - config_.dropout);
        auto& m = c.deep_drop[l];
        m.resize(c.deep_act[l].rows(), c.deep_act[l].cols());
        for (Eigen::Index i = 0; i < m.size(); ++i) {
          m.data()[i] = uniform_unit(*rng) < config_.dropout ? S(0) : S(1) / keep;
        }
        H = c.deep_act[l].cwiseProduct(m);
      } else {
        c.deep_drop[l].resize(0, 0);
        H = c.deep_act[l];
      }
    }
    c.hidden = std::move(H);
    c.logits = c.hidden * params_.out_w.value;
    c.logits.rowwise() += params_.out_b.value.row(0);
    c.logits = c.mask.asDiagonal() * c.logits;
  }

  // Emissions of sentence i from a forward cache.
  static Matrix<S> slice(const CnnCache<S>& c, std::size_t i) {
    return c.logits.middleRows(static_cast<Eigen::Index>(c.packing.offsets[i]),
                               static_cast<Eigen::Index>(c.packing.lengths[i]));
  }

  Matrix<S> emissions(const std::vector<std::size_t>& ids) const {
    CnnCache<S> c;
    forward({ids}, Mode::eval, nullptr, c);
    return c.logits;
  }

  // Accumulates parameter gradients from d loss / d logits (packed rows).
  void backward(const CnnCache<S>& c, const Matrix<S>& dlogits) {
    auto& p = params_;
    const Matrix<S> dZ = c.mask.asDiagonal() * dlogits;
    p.out_w.grad.noalias() += c.hidden.transpose() * dZ;
    p.out_b.grad += dZ.colwise().sum();
    Matrix<S> dH = dZ * p.out_w.value.transpose();

    for (std::size_t l = p.deep_w.size(); l-- > 0;) {
      Matrix<S> dA = dH;
      if (c.deep_drop[l].size() != 0) dA = dA.cwiseProduct(c.deep_drop[l]);
      relu_mask_backward(c.deep_act[l], c.mask, dA);
      p.deep_w[l].grad.noalias() += c.deep_col[l].transpose() * dA;
      p.deep_b[l].grad += dA.colwise().sum();
      const Matrix<S> dcol = dA * p.deep_w[l].value.transpose();
      dH.setZero(c.deep_col[l].rows(), dcol.cols() / static_cast<Eigen::Index>(config_.deep_kernel));
      detail::col2im_add(dcol, config_.deep_kernel, dH);
    }

    const auto P = c.act_a.cols();
    Matrix<S> dA = dH.leftCols(P);
    Matrix<S> dB = dH.rightCols(c.act_b.cols());
    relu_mask_backward(c.act_a, c.mask, dA);
    relu_mask_backward(c.act_b, c.mask, dB);
    p.conv_a_w.grad.noalias() += c.col_a.transpose() * dA;
    p.conv_a_b.grad += dA.colwise().sum();
    p.conv_b_w.grad.noalias() += c.col_b.transpose() * dB;
    p.conv_b_b.grad += dB.colwise().sum();

    Matrix<S> dX = Matrix<S>::Zero(dH.rows(), p.embed.value.cols());
    detail::col2im_add(Matrix<S>(dA * p.conv_a_w.value.transpose()), config_.kernel_a, dX);
    detail::col2im_add(Matrix<S>(dB * p.conv_b_w.value.transpose()), config_.kernel_b, dX);
    for (Eigen::Index r = 0; r < dX.rows(); ++r) {
      if (c.mask(r) != S(0)) p.embed.grad.row(static_cast<Eigen::Index>(c.ids[static_cast<std::size_t>(r)])) += dX.row(r);
    }
  }

 private:
  static Matrix<S> activate(const Matrix<S>& col, const Param<S>& w, const Param<S>& b,
                            const Eigen::Matrix<S, Eigen::Dynamic, 1>& mask) {
    Matrix<S> a = col * w.value;
    a.rowwise() += b.value.row(0);
    a = a.cwiseMax(S(0));
    return mask.asDiagonal() * a;
  }

  static void relu_mask_backward(const Matrix<S>& act, const Eigen::Matrix<S, Eigen::Dynamic, 1>& mask,
                                 Matrix<S>& d) {
    d = (act.array() > S(0)).select(d, S(0));
    d = mask.asDiagonal() * d;
  }

  CnnConfig config_;
  CnnParams<S> params_;
};

}  // namespace lexiforge::tagger
