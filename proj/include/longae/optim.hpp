#pragma once

#include "longae/model.hpp"
#include "longae/types.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace longae {

template <typename Scalar>
struct AdamConfig {
  Scalar lr = Scalar(1e-3);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);
};

// Adam with bias correction and no weight decay. Moment tensors mirror the
// parameter shapes; the step counter increments before each update.
template <typename Scalar>
class Adam {
 public:
  Adam(const ModelParams<Scalar>& shape, AdamConfig<Scalar> cfg = {})
      : cfg_(cfg),
        m_(Gradients<Scalar>::zeros_like(shape)),
        v_(Gradients<Scalar>::zeros_like(shape)) {}

  long step_count() const { return t_; }
  const AdamConfig<Scalar>& config() const { return cfg_; }

  void step(ModelParams<Scalar>& params, const Gradients<Scalar>& grads) {
    ++t_;
    const Scalar m_corr = Scalar(1) - std::pow(cfg_.beta1, Scalar(t_));
    const Scalar v_corr = Scalar(1) - std::pow(cfg_.beta2, Scalar(t_));
    update(params.V, grads.V, m_.V, v_.V, m_corr, v_corr);
    update(params.W, grads.W, m_.W, v_.W, m_corr, v_corr);
    update(params.b1, grads.b1, m_.b1, v_.b1, m_corr, v_corr);
    update(params.b2, grads.b2, m_.b2, v_.b2, m_corr, v_corr);
    update(params.b3, grads.b3, m_.b3, v_.b3, m_corr, v_corr);
    update(params.b4, grads.b4, m_.b4, v_.b4, m_corr, v_corr);
    if (params.has_classifier()) {
      update(params.U, grads.U, m_.U, v_.U, m_corr, v_corr);
      update(params.b5, grads.b5, m_.b5, v_.b5, m_corr, v_corr);
    }
  }

 private:
  template <typename Tensor>
  void update(Tensor& p, const Tensor& g, Tensor& m, Tensor& v, Scalar m_corr,
              Scalar v_corr) {
    if (p.rows() != g.rows() || p.cols() != g.cols()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
    m = cfg_.beta1 * m + (Scalar(1) - cfg_.beta1) * g;
    v.array() = cfg_.beta2 * v.array() + (Scalar(1) - cfg_.beta2) * g.array().square();
    p.array() -= cfg_.lr * (m.array() / m_corr) /
                 ((v.array() / v_corr).sqrt() + cfg_.eps);
  }

  AdamConfig<Scalar> cfg_;
  Gradients<Scalar> m_;
  Gradients<Scalar> v_;
  long t_ = 0;
};

// Patience-based early stopping on a maximized metric. Strict improvement
// resets the counter and snapshots the parameters; update() returns true when
// the counter exceeds the patience. The snapshot holds the best weights.
template <typename Scalar>
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  // True means stop now.
  bool update(double metric, const ModelParams<Scalar>& params) {
    if (!std::isfinite(metric)) {
      throw std::invalid_argument("early_stop_check: metric not finite");
    }
    if (metric > best_metric_) {
      best_metric_ = metric;
      snapshot_ = params;
      epochs_since_best_ = 0;
      return false;
    }
    ++epochs_since_best_;
    return epochs_since_best_ > patience_;
  }

  double best_metric() const { return best_metric_; }
  int epochs_since_best() const { return epochs_since_best_; }
  bool has_snapshot() const { return snapshot_.has_value(); }

  // Best-so-far weights, bit-identical to the snapshotted state.
  const ModelParams<Scalar>& best_params() const {
    if (!snapshot_.has_value()) {
      throw std::logic_error("EarlyStopping: no snapshot taken yet");
    }
    return *snapshot_;
  }

 private:
  int patience_;
  int epochs_since_best_ = 0;
  double best_metric_ = -std::numeric_limits<double>::infinity();
  std::optional<ModelParams<Scalar>> snapshot_;
};

}  // namespace longae
