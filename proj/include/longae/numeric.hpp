#pragma once

#include "longae/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace longae {

// Dense numeric kernels shared by the model: matrix-vector products,
// activations, per-example mean-variance normalization (MVN), inverted
// dropout and Xavier initialization. Batched variants treat each column of a
// matrix as one example.

namespace detail {

inline std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace detail

// Standard matrix-vector product; transposed mode reads the same storage, no
// copy is made. The summation order is fixed per output element so the
// transposed view matches an explicit transpose bitwise.
template <typename Scalar>
VectorX<Scalar> matvec(const MatrixX<Scalar>& m, const VectorX<Scalar>& v,
                       bool transpose = false) {
  const Index need = transpose ? m.rows() : m.cols();
  if (need != v.size()) {
    throw std::invalid_argument(
        "matvec: matrix " + detail::shape_string(m.rows(), m.cols()) +
        (transpose ? " (transposed)" : "") + " incompatible with vector of dim " +
        std::to_string(v.size()));
  }
  const Index out_dim = transpose ? m.cols() : m.rows();
  VectorX<Scalar> out(out_dim);
  for (Index r = 0; r < out_dim; ++r) {
    Scalar acc = 0;
    for (Index k = 0; k < need; ++k) {
      acc += (transpose ? m(k, r) : m(r, k)) * v[k];
    }
    out[r] = acc;
  }
  return out;
}

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.cwiseMax(S(0));
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (S(1) / (S(1) + (-x.array()).exp())).matrix();
}

// Exp-normalized with max subtraction so large logits cannot overflow.
template <typename Scalar>
VectorX<Scalar> softmax(const VectorX<Scalar>& v) {
  const Scalar peak = v.maxCoeff();
  VectorX<Scalar> e = (v.array() - peak).exp();
  return e / e.sum();
}

template <typename Scalar>
MatrixX<Scalar> softmax_columns(const MatrixX<Scalar>& m) {
  MatrixX<Scalar> out(m.rows(), m.cols());
  for (Index c = 0; c < m.cols(); ++c) {
    out.col(c) = softmax<Scalar>(m.col(c));
  }
  return out;
}

// Per-example MVN: zero mean, unit variance over the vector's own components
// (population variance). Identical at train and inference time.
template <typename Scalar>
VectorX<Scalar> mvn_normalize(const VectorX<Scalar>& v,
                              Scalar epsilon = Scalar(1e-8)) {
  if (v.size() < 1) throw std::invalid_argument("mvn_normalize: empty vector");
  const Scalar mean = v.mean();
  const Scalar var = (v.array() - mean).square().mean();
  return (v.array() - mean).matrix() / std::sqrt(var + epsilon);
}

// Column-wise MVN in place; returns the per-column 1/sqrt(var+eps) needed by
// the backward pass.
template <typename Scalar>
VectorX<Scalar> mvn_columns_inplace(MatrixX<Scalar>& x, Scalar epsilon) {
  const Scalar rows = Scalar(x.rows());
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> mean = x.colwise().mean();
  x.rowwise() -= mean;
  VectorX<Scalar> inv_std =
      ((x.colwise().squaredNorm().transpose() / rows).array() + epsilon)
          .sqrt()
          .inverse();
  x = x * inv_std.asDiagonal();
  return inv_std;
}

// Exact MVN Jacobian applied to upstream gradients: for y = (x-mu)*inv_std,
// dL/dx = inv_std * (g - mean(g) - y * mean(g .* y)), per column.
template <typename Scalar>
MatrixX<Scalar> mvn_backward_columns(const MatrixX<Scalar>& dy,
                                     const MatrixX<Scalar>& y,
                                     const VectorX<Scalar>& inv_std) {
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> g_mean = dy.colwise().mean();
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> gy_mean =
      (dy.array() * y.array()).colwise().mean();
  MatrixX<Scalar> dx = dy;
  dx.rowwise() -= g_mean;
  dx.noalias() -= y * gy_mean.asDiagonal();
  dx = dx * inv_std.asDiagonal();
  return dx;
}

// Scaled keep/drop mask from inverted dropout; entries are 0 or 1/(1-rate).
template <typename Scalar>
struct DropoutMask {
  MatrixX<Scalar> scale;
  bool active = false;
};

// Inverted dropout on columns, in place. Draw order is fixed: for each
// column (example) in turn, one uniform per row. Inference is the identity
// and consumes no randomness.
template <typename Scalar>
DropoutMask<Scalar> dropout_columns_inplace(MatrixX<Scalar>& x, double rate,
                                            Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) {
    throw std::invalid_argument("dropout: rate must be in [0,1), got " +
                                std::to_string(rate));
  }
  DropoutMask<Scalar> mask;
  if (!training || rate == 0.0) return mask;
  mask.active = true;
  mask.scale.resize(x.rows(), x.cols());
  const Scalar keep = Scalar(1.0 / (1.0 - rate));
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index r = 0; r < x.rows(); ++r) {
      mask.scale(r, c) = rng.uniform() < rate ? Scalar(0) : keep;
    }
  }
  x.array() *= mask.scale.array();
  return mask;
}

// Single-vector dropout; returns the output and the scaled mask (all ones
// when inactive).
template <typename Scalar>
std::pair<VectorX<Scalar>, VectorX<Scalar>> dropout(const VectorX<Scalar>& v,
                                                    double rate, Rng& rng,
                                                    bool training) {
  MatrixX<Scalar> m = v;
  const DropoutMask<Scalar> mask = dropout_columns_inplace(m, rate, rng, training);
  VectorX<Scalar> scale = mask.active ? VectorX<Scalar>(mask.scale.col(0))
                                      : VectorX<Scalar>::Ones(v.size());
  return {VectorX<Scalar>(m.col(0)), std::move(scale)};
}

// Uniform draws in [-limit, +limit], limit = sqrt(6/(rows+cols)). Fill order
// is column-major. Biases are initialized to zero elsewhere.
template <typename Scalar>
MatrixX<Scalar> xavier_init(Index rows, Index cols, Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("xavier_init: rows and cols must be >= 1");
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  MatrixX<Scalar> m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      m(r, c) = Scalar((2.0 * rng.uniform() - 1.0) * limit);
    }
  }
  return m;
}

}  // namespace longae
