#pragma once

#include "longae/graph.hpp"
#include "longae/types.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace longae {

struct LossConfig {
  double zeta = 1.0;               // positive-class multiplier in [0,1]
  double clamp_epsilon = 1e-7;     // probability clamp inside the loss value
  bool average_feature_ce = true;  // mean over F; flag off to sum instead
};

// zeta = 1 - (observed present / observed absent) over off-diagonal entries
// (the dataset imbalance-ratio convention; the forced diagonal never counts),
// clamped to [0,1].
inline double compute_zeta(const MaskedAdjacency& adj,
                           std::optional<Index> row = std::nullopt) {
  const MaskedAdjacency::Counts counts =
      row.has_value() ? adj.row_offdiag_counts(*row) : adj.offdiag_dyad_counts();
  if (counts.absent == 0) {
    throw std::invalid_argument("compute_zeta: no observed absent entries in scope");
  }
  const double zeta = 1.0 - double(counts.present) / double(counts.absent);
  return std::clamp(zeta, 0.0, 1.0);
}

namespace detail {

// Per-element balanced cross-entropy against sigmoid(logit), with the
// probability clamped to [eps, 1-eps] inside the loss value only; the
// gradient uses the exact sigmoid. zeta is a constant (no gradient through
// it). Returns the weighted sum over mask and writes the unnormalized
// per-element gradient mask .* (zeta*t*(p-1) + (1-t)*p).
template <typename Scalar, typename DT, typename DL, typename DM>
Scalar masked_bce_sum(const Eigen::MatrixBase<DT>& targets,
                      const Eigen::MatrixBase<DL>& logits,
                      const Eigen::MatrixBase<DM>& mask, double zeta,
                      double clamp_epsilon, VectorX<Scalar>& grad_out) {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  const Array t = targets.derived().array();
  const Array m = mask.derived().array();
  const Array p = Scalar(1) / (Scalar(1) + (-logits.derived().array()).exp());
  const Array pc =
      p.max(Scalar(clamp_epsilon)).min(Scalar(1.0 - clamp_epsilon));
  const Scalar z = Scalar(zeta);
  const Scalar value =
      (m * (-(t * pc.log() * z) - (Scalar(1) - t) * (Scalar(1) - pc).log())).sum();
  grad_out = (m * (z * t * (p - Scalar(1)) + (Scalar(1) - t) * p)).matrix();
  return value;
}

}  // namespace detail

template <typename Scalar>
struct MbceResult {
  Scalar value = 0;
  VectorX<Scalar> d_logits;
};

// Masked balanced cross-entropy for one row: per-element BCE with the
// positive term multiplied by zeta, zeroed at unobserved entries and
// normalized by the observed count.
template <typename Scalar>
MbceResult<Scalar> mbce(const Eigen::Ref<const VectorX<Scalar>>& targets,
                        const Eigen::Ref<const VectorX<Scalar>>& logits,
                        const Eigen::Ref<const VectorX<Scalar>>& mask,
                        const LossConfig& cfg) {
  if (targets.size() != logits.size() || targets.size() != mask.size()) {
    throw std::invalid_argument("mbce: targets/logits/mask lengths differ");
  }
  const Scalar mask_sum = mask.sum();
  if (!(mask_sum > Scalar(0))) {
    throw std::invalid_argument("mbce: every entry is masked, loss undefined");
  }
  MbceResult<Scalar> r;
  r.value = detail::masked_bce_sum<Scalar>(targets, logits, mask, cfg.zeta,
                                           cfg.clamp_epsilon, r.d_logits) /
            mask_sum;
  r.d_logits /= mask_sum;
  return r;
}

template <typename Scalar>
struct AlphaMbceResult {
  Scalar value = 0;
  VectorX<Scalar> d_a_logits;
  VectorX<Scalar> d_x_logits;
};

// MBCE on the adjacency slice plus unweighted, unmasked sigmoid cross-entropy
// on the feature slice (soft targets in [0,1] supported), the latter averaged
// over F by default. Reduces exactly to mbce when F = 0.
template <typename Scalar>
AlphaMbceResult<Scalar> alpha_mbce(const AugmentedRow<Scalar>& row,
                                   const Eigen::Ref<const VectorX<Scalar>>& a_logits,
                                   const Eigen::Ref<const VectorX<Scalar>>& x_logits,
                                   const LossConfig& cfg) {
  if (x_logits.size() != row.x_part.size()) {
    throw std::invalid_argument("alpha_mbce: feature slice length mismatch");
  }
  const MbceResult<Scalar> a = mbce<Scalar>(row.a_part, a_logits, row.mask, cfg);
  AlphaMbceResult<Scalar> r;
  r.value = a.value;
  r.d_a_logits = a.d_logits;
  const Index f = x_logits.size();
  if (f == 0) {
    r.d_x_logits.resize(0);
    return r;
  }
  VectorX<Scalar> grad;
  const Eigen::Ref<const VectorX<Scalar>> x_part(row.x_part);
  Scalar ce = detail::masked_bce_sum<Scalar>(
      x_part, x_logits, VectorX<Scalar>::Ones(f), 1.0, cfg.clamp_epsilon, grad);
  if (cfg.average_feature_ce) {
    ce /= Scalar(f);
    grad /= Scalar(f);
  }
  r.value += ce;
  r.d_x_logits = std::move(grad);
  return r;
}

template <typename Scalar>
struct MultitaskResult {
  Scalar value = 0;
  VectorX<Scalar> d_a_logits;
  VectorX<Scalar> d_class_logits;
};

// Joint objective: the MBCE term always, plus softmax cross-entropy against
// the node label when one is supplied (the label-mask semantics). The
// classifier gradient is softmax(class_logits) - onehot(label).
template <typename Scalar>
MultitaskResult<Scalar> multitask_loss(const Eigen::Ref<const VectorX<Scalar>>& a_targets,
                                       const Eigen::Ref<const VectorX<Scalar>>& a_logits,
                                       const Eigen::Ref<const VectorX<Scalar>>& a_mask,
                                       std::optional<Index> label,
                                       const Eigen::Ref<const VectorX<Scalar>>& class_logits,
                                       const LossConfig& cfg) {
  const MbceResult<Scalar> a = mbce<Scalar>(a_targets, a_logits, a_mask, cfg);
  MultitaskResult<Scalar> r;
  r.value = a.value;
  r.d_a_logits = a.d_logits;
  r.d_class_logits = VectorX<Scalar>::Zero(class_logits.size());
  if (!label.has_value()) return r;

  if (*label < 0 || *label >= class_logits.size()) {
    throw std::out_of_range("multitask_loss: label " + std::to_string(*label) +
                            " out of range for " + std::to_string(class_logits.size()) +
                            " classes");
  }
  const Scalar peak = class_logits.maxCoeff();
  const VectorX<Scalar> shifted = class_logits.array() - peak;
  const Scalar log_norm = std::log(shifted.array().exp().sum());
  r.value += log_norm - shifted[*label];
  r.d_class_logits = (shifted.array() - log_norm).exp().matrix();
  r.d_class_logits[*label] -= Scalar(1);
  return r;
}

}  // namespace longae
