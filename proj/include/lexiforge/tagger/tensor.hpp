#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace lexiforge::tagger {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using RowVector = Eigen::Matrix<S, 1, Eigen::Dynamic>;

// A named trainable tensor with its gradient accumulator.
template <class S>
struct Param {
  std::string name;
  Matrix<S> value;
  Matrix<S> grad;

  Param() = default;
  Param(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Matrix<S>::Zero(rows, cols)), grad(Matrix<S>::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
};

template <class S>
using ParamList = std::vector<Param<S>*>;

}  // namespace lexiforge::tagger
