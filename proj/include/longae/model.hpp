#pragma once

#include "longae/graph.hpp"
#include "longae/numeric.hpp"
#include "longae/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <unordered_map>
#include <vector>

namespace longae {

// Tied-weight autoencoder over adjacency rows (optionally concatenated with
// node features). The encoder applies V then W; the decoder reads the same
// storage transposed, so V and W each receive gradient contributions from
// both sides. U/b5 form the optional softmax classifier head that branches
// off the decoder's first hidden activation.
//
// Layer recipe: affine -> ReLU -> MVN -> dropout for the three hidden layers;
// the final decoder layer is a pure linear scorer. Forward passes never
// mutate the parameters, so inference over distinct rows may run
// concurrently; updates are single-owner between batches.
template <typename Scalar>
struct ModelParams {
  MatrixX<Scalar> V;   // hidden_dim x input_dim
  MatrixX<Scalar> W;   // embedding_dim x hidden_dim
  VectorX<Scalar> b1;  // hidden_dim     (encoder layer 1)
  VectorX<Scalar> b2;  // embedding_dim  (encoder layer 2)
  VectorX<Scalar> b3;  // hidden_dim     (decoder layer 1)
  VectorX<Scalar> b4;  // input_dim      (decoder output)
  MatrixX<Scalar> U;   // num_classes x hidden_dim, 0x0 without a classifier
  VectorX<Scalar> b5;  // num_classes

  Index input_dim() const { return V.cols(); }
  Index hidden_dim() const { return V.rows(); }
  Index embedding_dim() const { return W.rows(); }
  Index num_classes() const { return U.rows(); }
  bool has_classifier() const { return U.size() > 0; }

  // Trainable scalars; the decoder adds none because it reuses V and W.
  std::int64_t parameter_count() const {
    return V.size() + W.size() + b1.size() + b2.size() + b3.size() + b4.size() +
           U.size() + b5.size();
  }

  // Xavier-initialized weights (draw order V, W, U), zero biases.
  static ModelParams init(Index input_dim, Index hidden_dim, Index embedding_dim,
                          Index num_classes, Rng& rng) {
    ModelParams p;
    p.V = xavier_init<Scalar>(hidden_dim, input_dim, rng);
    p.W = xavier_init<Scalar>(embedding_dim, hidden_dim, rng);
    p.b1 = VectorX<Scalar>::Zero(hidden_dim);
    p.b2 = VectorX<Scalar>::Zero(embedding_dim);
    p.b3 = VectorX<Scalar>::Zero(hidden_dim);
    p.b4 = VectorX<Scalar>::Zero(input_dim);
    if (num_classes > 0) {
      p.U = xavier_init<Scalar>(num_classes, hidden_dim, rng);
      p.b5 = VectorX<Scalar>::Zero(num_classes);
    }
    return p;
  }

  template <typename Other>
  ModelParams<Other> cast() const {
    ModelParams<Other> p;
    p.V = V.template cast<Other>();
    p.W = W.template cast<Other>();
    p.b1 = b1.template cast<Other>();
    p.b2 = b2.template cast<Other>();
    p.b3 = b3.template cast<Other>();
    p.b4 = b4.template cast<Other>();
    if (has_classifier()) {
      p.U = U.template cast<Other>();
      p.b5 = b5.template cast<Other>();
    }
    return p;
  }
};

// One gradient tensor per parameter tensor. V and W hold the SUM of their
// encoder-side and decoder-side contributions.
template <typename Scalar>
struct Gradients {
  MatrixX<Scalar> V;
  MatrixX<Scalar> W;
  VectorX<Scalar> b1, b2, b3, b4;
  MatrixX<Scalar> U;
  VectorX<Scalar> b5;

  static Gradients zeros_like(const ModelParams<Scalar>& p) {
    Gradients g;
    g.V = MatrixX<Scalar>::Zero(p.V.rows(), p.V.cols());
    g.W = MatrixX<Scalar>::Zero(p.W.rows(), p.W.cols());
    g.b1 = VectorX<Scalar>::Zero(p.b1.size());
    g.b2 = VectorX<Scalar>::Zero(p.b2.size());
    g.b3 = VectorX<Scalar>::Zero(p.b3.size());
    g.b4 = VectorX<Scalar>::Zero(p.b4.size());
    if (p.has_classifier()) {
      g.U = MatrixX<Scalar>::Zero(p.U.rows(), p.U.cols());
      g.b5 = VectorX<Scalar>::Zero(p.b5.size());
    }
    return g;
  }
};

// Visits tensors in the fixed declared order (also the checkpoint order):
// V, W, b1, b2, b3, b4, then U, b5 when the classifier head exists.
template <typename Bag, typename Fn>
void visit_tensors(Bag& bag, Fn&& fn) {
  fn(bag.V);
  fn(bag.W);
  fn(bag.b1);
  fn(bag.b2);
  fn(bag.b3);
  fn(bag.b4);
  if (bag.U.size() > 0) {
    fn(bag.U);
    fn(bag.b5);
  }
}

template <typename Scalar>
struct ForwardOptions {
  bool training = false;
  double input_dropout = 0.0;   // denoising dropout on the input row
  double hidden_dropout = 0.0;  // after each hidden MVN
  Scalar mvn_epsilon = Scalar(1e-8);
  bool use_mvn = true;
};

// Cached activations for a batch (one column per example), everything the
// backward pass needs: pre-activations for the ReLU gates, post-MVN values,
// per-column MVN statistics and the scaled dropout masks.
template <typename Scalar>
struct ForwardTrace {
  MatrixX<Scalar> input;  // after input dropout
  DropoutMask<Scalar> input_mask;

  MatrixX<Scalar> enc1_pre, enc1_act;  // act = post ReLU+MVN
  VectorX<Scalar> enc1_inv_std;
  DropoutMask<Scalar> enc1_mask;
  MatrixX<Scalar> enc1_out;  // act after dropout

  MatrixX<Scalar> enc2_pre, enc2_act;  // enc2_act = embedding z
  VectorX<Scalar> enc2_inv_std;
  DropoutMask<Scalar> enc2_mask;
  MatrixX<Scalar> enc2_out;

  MatrixX<Scalar> dec1_pre, dec1_act;  // dec1_act feeds the classifier branch
  VectorX<Scalar> dec1_inv_std;
  DropoutMask<Scalar> dec1_mask;
  MatrixX<Scalar> dec1_out;

  MatrixX<Scalar> out_logits;  // input_dim x batch; rows [0,n) score links,
                               // rows [n,input_dim) reconstruct features

  MatrixX<Scalar> class_logits;  // filled by forward_classifier
  MatrixX<Scalar> class_probs;

  Index batch() const { return input.cols(); }
  VectorX<Scalar> z(Index b = 0) const { return enc2_act.col(b); }
};

namespace detail {

// affine -> ReLU -> MVN -> dropout, shared by all three hidden layers.
template <typename Scalar, typename Product>
void hidden_layer(const Product& affine, const VectorX<Scalar>& bias,
                  const ForwardOptions<Scalar>& opts, Rng* rng, MatrixX<Scalar>& pre,
                  MatrixX<Scalar>& act, VectorX<Scalar>& inv_std,
                  DropoutMask<Scalar>& mask, MatrixX<Scalar>& out) {
  pre = affine;
  pre.colwise() += bias;
  act = relu(pre);
  if (opts.use_mvn) inv_std = mvn_columns_inplace(act, opts.mvn_epsilon);
  out = act;
  if (opts.training && opts.hidden_dropout > 0.0) {
    mask = dropout_columns_inplace(out, opts.hidden_dropout, *rng, true);
  }
}

template <typename Scalar>
void check_training_rng(const ForwardOptions<Scalar>& opts, const Rng* rng) {
  if (opts.training && (opts.input_dropout > 0.0 || opts.hidden_dropout > 0.0) &&
      rng == nullptr) {
    throw std::invalid_argument("forward: training with dropout requires an Rng");
  }
}

}  // namespace detail

// Two encoder layers mapping an input row (or batch of rows as columns) to
// the embedding z. Inference consumes no randomness.
template <typename Scalar>
ForwardTrace<Scalar> encode(const ModelParams<Scalar>& params, const MatrixX<Scalar>& rows,
                            const ForwardOptions<Scalar>& opts, Rng* rng = nullptr) {
  if (rows.rows() != params.input_dim()) {
    throw std::invalid_argument("encode: input dim " + std::to_string(rows.rows()) +
                                " != model input dim " +
                                std::to_string(params.input_dim()));
  }
  detail::check_training_rng(opts, rng);
  ForwardTrace<Scalar> trace;
  trace.input = rows;
  if (opts.training && opts.input_dropout > 0.0) {
    trace.input_mask = dropout_columns_inplace(trace.input, opts.input_dropout, *rng, true);
  }
  detail::hidden_layer<Scalar>(params.V * trace.input, params.b1, opts, rng,
                               trace.enc1_pre, trace.enc1_act, trace.enc1_inv_std,
                               trace.enc1_mask, trace.enc1_out);
  detail::hidden_layer<Scalar>(params.W * trace.enc1_out, params.b2, opts, rng,
                               trace.enc2_pre, trace.enc2_act, trace.enc2_inv_std,
                               trace.enc2_mask, trace.enc2_out);
  return trace;
}

template <typename Scalar>
ForwardTrace<Scalar> encode(const ModelParams<Scalar>& params, const VectorX<Scalar>& row,
                            const ForwardOptions<Scalar>& opts, Rng* rng = nullptr) {
  return encode(params, MatrixX<Scalar>(row), opts, rng);
}

// Full autoencoder pass; the final layer is linear (no activation), its
// output split by the caller into link scores and feature reconstruction.
template <typename Scalar>
ForwardTrace<Scalar> forward_autoencoder(const ModelParams<Scalar>& params,
                                         const MatrixX<Scalar>& rows,
                                         const ForwardOptions<Scalar>& opts,
                                         Rng* rng = nullptr) {
  ForwardTrace<Scalar> trace = encode(params, rows, opts, rng);
  detail::hidden_layer<Scalar>(params.W.transpose() * trace.enc2_out, params.b3, opts, rng,
                               trace.dec1_pre, trace.dec1_act, trace.dec1_inv_std,
                               trace.dec1_mask, trace.dec1_out);
  trace.out_logits = params.V.transpose() * trace.dec1_out;
  trace.out_logits.colwise() += params.b4;
  return trace;
}

template <typename Scalar>
ForwardTrace<Scalar> forward_autoencoder(const ModelParams<Scalar>& params,
                                         const VectorX<Scalar>& row,
                                         const ForwardOptions<Scalar>& opts,
                                         Rng* rng = nullptr) {
  return forward_autoencoder(params, MatrixX<Scalar>(row), opts, rng);
}

// Softmax head on the decoder's first hidden activation. The branch reads the
// shared post-MVN value before the reconstruction path's dropout, so label
// predictions are deterministic per forward pass.
template <typename Scalar>
void forward_classifier(const ModelParams<Scalar>& params, ForwardTrace<Scalar>& trace) {
  if (!params.has_classifier()) {
    throw std::invalid_argument("forward_classifier: model has no classifier head");
  }
  if (trace.dec1_act.size() == 0) {
    throw std::invalid_argument("forward_classifier: trace lacks the decoder activation");
  }
  trace.class_logits = params.U * trace.dec1_act;
  trace.class_logits.colwise() += params.b5;
  trace.class_probs = softmax_columns(trace.class_logits);
}

// Chain-rule gradients from per-output loss gradients. d_a_logits covers the
// adjacency slice; d_x_logits the feature slice (zero when absent);
// d_class_logits the classifier branch. Encoder- and decoder-side
// contributions to V and W are summed.
template <typename Scalar>
Gradients<Scalar> backward(const ModelParams<Scalar>& params, const ForwardTrace<Scalar>& trace,
                           const MatrixX<Scalar>& d_a_logits,
                           const std::type_identity_t<MatrixX<Scalar>>* d_x_logits = nullptr,
                           const std::type_identity_t<MatrixX<Scalar>>* d_class_logits = nullptr,
                           const std::type_identity_t<ForwardOptions<Scalar>>& opts = {}) {
  const Index in_dim = params.input_dim();
  const Index batch = trace.batch();
  const Index f_dim = in_dim - d_a_logits.rows();
  if (f_dim < 0 || d_a_logits.cols() != batch) {
    throw std::invalid_argument("backward: adjacency gradient shape mismatch");
  }
  if (d_x_logits != nullptr &&
      (d_x_logits->rows() != f_dim || d_x_logits->cols() != batch)) {
    throw std::invalid_argument("backward: feature gradient shape mismatch");
  }
  if (d_class_logits != nullptr &&
      (d_class_logits->rows() != params.num_classes() || d_class_logits->cols() != batch)) {
    throw std::invalid_argument("backward: classifier gradient shape mismatch");
  }
  if (opts.use_mvn && trace.enc1_inv_std.size() != batch) {
    throw std::invalid_argument("backward: trace was produced without MVN statistics");
  }

  Gradients<Scalar> g = Gradients<Scalar>::zeros_like(params);

  MatrixX<Scalar> d_out(in_dim, batch);
  d_out.topRows(d_a_logits.rows()) = d_a_logits;
  if (f_dim > 0) {
    if (d_x_logits != nullptr) {
      d_out.bottomRows(f_dim) = *d_x_logits;
    } else {
      d_out.bottomRows(f_dim).setZero();
    }
  }

  // Final linear layer: out = V^T dec1_out + b4.
  g.b4 = d_out.rowwise().sum();
  g.V.noalias() = trace.dec1_out * d_out.transpose();  // decoder-side contribution
  MatrixX<Scalar> d = params.V * d_out;                // grad wrt dec1_out

  if (trace.dec1_mask.active) d.array() *= trace.dec1_mask.scale.array();
  if (d_class_logits != nullptr && params.has_classifier()) {
    g.U.noalias() = *d_class_logits * trace.dec1_act.transpose();
    g.b5 = d_class_logits->rowwise().sum();
    d.noalias() += params.U.transpose() * *d_class_logits;
  }
  if (opts.use_mvn) d = mvn_backward_columns(d, trace.dec1_act, trace.dec1_inv_std);
  d.array() *= (trace.dec1_pre.array() > Scalar(0)).template cast<Scalar>();

  // Decoder hidden layer: dec1_pre = W^T enc2_out + b3.
  g.b3 = d.rowwise().sum();
  g.W.noalias() = trace.enc2_out * d.transpose();  // decoder-side contribution
  MatrixX<Scalar> dz = params.W * d;               // grad wrt enc2_out

  if (trace.enc2_mask.active) dz.array() *= trace.enc2_mask.scale.array();
  if (opts.use_mvn) dz = mvn_backward_columns(dz, trace.enc2_act, trace.enc2_inv_std);
  dz.array() *= (trace.enc2_pre.array() > Scalar(0)).template cast<Scalar>();

  // Encoder layer 2: enc2_pre = W enc1_out + b2.
  g.b2 = dz.rowwise().sum();
  g.W.noalias() += dz * trace.enc1_out.transpose();
  MatrixX<Scalar> dh = params.W.transpose() * dz;

  if (trace.enc1_mask.active) dh.array() *= trace.enc1_mask.scale.array();
  if (opts.use_mvn) dh = mvn_backward_columns(dh, trace.enc1_act, trace.enc1_inv_std);
  dh.array() *= (trace.enc1_pre.array() > Scalar(0)).template cast<Scalar>();

  // Encoder layer 1: enc1_pre = V input + b1.
  g.b1 = dh.rowwise().sum();
  g.V.noalias() += dh * trace.input.transpose();

  return g;
}

// Link probabilities for a list of dyads. Each involved row is forwarded once
// in inference mode and reused across pairs; the score for (i,j) is
// sigma(a_hat_i[j]), averaged with sigma(a_hat_j[i]) when symmetrize is set.
template <typename Scalar>
std::vector<double> score_pairs(const ModelParams<Scalar>& params, const MaskedAdjacency& adj,
                                const FeatureMatrix* feats, const std::vector<Dyad>& pairs,
                                bool symmetrize = true,
                                ForwardOptions<Scalar> opts = {}) {
  const Index n = adj.n();
  for (const Dyad& d : pairs) {
    if (d.i < 0 || d.j >= n || d.i == d.j) {
      throw std::invalid_argument("score_pairs: dyad (" + std::to_string(d.i) + "," +
                                  std::to_string(d.j) + ") out of range or diagonal");
    }
  }
  opts.training = false;

  std::vector<Index> wanted;
  wanted.reserve(pairs.size() * 2);
  for (const Dyad& d : pairs) {
    wanted.push_back(d.i);
    if (symmetrize) wanted.push_back(d.j);
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  // Forward unique rows in chunks; cache only the adjacency slice.
  std::unordered_map<Index, VectorX<Scalar>> row_logits;
  row_logits.reserve(wanted.size());
  const Index chunk = 64;
  const Index in_dim = params.input_dim();
  for (std::size_t start = 0; start < wanted.size(); start += std::size_t(chunk)) {
    const Index b = Index(std::min(std::size_t(chunk), wanted.size() - start));
    MatrixX<Scalar> inputs(in_dim, b);
    for (Index c = 0; c < b; ++c) {
      inputs.col(c) = augment_row<Scalar>(adj, feats, wanted[start + std::size_t(c)])
                          .concatenated();
    }
    ForwardTrace<Scalar> trace = forward_autoencoder(params, inputs, opts);
    for (Index c = 0; c < b; ++c) {
      row_logits.emplace(wanted[start + std::size_t(c)],
                         trace.out_logits.col(c).head(n));
    }
  }

  auto prob = [](Scalar logit) { return 1.0 / (1.0 + std::exp(-double(logit))); };
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const Dyad& d : pairs) {
    double s = prob(row_logits.at(d.i)[d.j]);
    if (symmetrize) s = 0.5 * (s + prob(row_logits.at(d.j)[d.i]));
    scores.push_back(s);
  }
  return scores;
}

}  // namespace longae
