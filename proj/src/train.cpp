#include "longae/train.hpp"

#include "longae/loss.hpp"
#include "longae/metrics.hpp"
#include "longae/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <span>

namespace longae {

std::string task_name(Task task) {
  switch (task) {
    case Task::reconstruct: return "reconstruct";
    case Task::link_predict: return "link_predict";
    case Task::node_classify: return "node_classify";
    case Task::multitask: return "multitask";
  }
  return "?";
}

std::optional<Task> parse_task(const std::string& name) {
  if (name == "reconstruct" || name == "recon") return Task::reconstruct;
  if (name == "link_predict" || name == "lp") return Task::link_predict;
  if (name == "node_classify" || name == "nc") return Task::node_classify;
  if (name == "multitask" || name == "mt") return Task::multitask;
  return std::nullopt;
}

TrainConfig TrainConfig::resolved() const {
  TrainConfig c = *this;
  const bool row_task = task == Task::link_predict || task == Task::reconstruct;
  if (c.epochs < 0) c.epochs = row_task ? 50 : 100;
  if (c.batch_size < 0) c.batch_size = row_task ? 8 : 64;
  if (c.input_dropout < 0) c.input_dropout = task == Task::node_classify ? 0.0 : 0.2;
  if (c.epochs < 1 || c.batch_size < 1) {
    throw std::invalid_argument("TrainConfig: epochs and batch_size must be positive");
  }
  if (c.input_dropout >= 1.0 || c.hidden_dropout < 0.0 || c.hidden_dropout >= 1.0) {
    throw std::invalid_argument("TrainConfig: dropout rates must lie in [0,1)");
  }
  if (c.learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be positive");
  if (c.hidden_dim < 1 || c.embedding_dim < 1) {
    throw std::invalid_argument("TrainConfig: hidden dims must be positive");
  }
  return c;
}

namespace {

std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Stream ids for Rng::derive: parameter init, the training loop (shuffles and
// dropout), and data-side sampling (degrade, carved holdouts). Separate
// streams keep the weight-init draws independent of the training sequence, so
// adding a classifier head does not shift the shared tensors' trajectory.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kDataStream = 2;

// Input batch (clean; dropout happens inside the forward pass), adjacency
// targets with observation mask, and feature targets when requested.
void fill_batch(const MaskedAdjacency& adj, const FeatureMatrix* feats,
                std::span<const Index> rows, MatrixXf& inputs, MatrixXf& a_targets,
                MatrixXf& mask, MatrixXf* x_targets) {
  const Index n = adj.n();
  const Index f = feats != nullptr ? feats->f() : 0;
  const Index b = Index(rows.size());
  inputs.resize(n + f, b);
  a_targets.resize(n, b);
  mask.resize(n, b);
  if (x_targets != nullptr) x_targets->resize(f, b);
  for (Index c = 0; c < b; ++c) {
    VectorXf values(n), m(n);
    adj.fill_row<float>(rows[std::size_t(c)], values, m);
    a_targets.col(c) = values;
    mask.col(c) = m;
    inputs.col(c).head(n) = values;
    if (f > 0) {
      inputs.col(c).tail(f) = feats->columns().col(rows[std::size_t(c)]);
      if (x_targets != nullptr) x_targets->col(c) = feats->columns().col(rows[std::size_t(c)]);
    }
  }
}

enum class LossKind { mbce, alpha_mbce, multitask };

struct LoopSpec {
  const MaskedAdjacency* adj = nullptr;  // training adjacency
  const FeatureMatrix* feats = nullptr;
  const LabelSet* labels = nullptr;  // train-split labels drive the CE term
  LossKind loss = LossKind::mbce;
  // Maximized validation metric; empty disables early stopping.
  std::function<double(const ModelParams<float>&)> val_metric;
  TrainConfig cfg;
};

struct LoopOutcome {
  ModelParams<float> params;
  int epochs_run = 0;
  double final_loss = 0.0;
  double best_val = 0.0;
  double zeta = 1.0;
};

LoopOutcome train_loop(const LoopSpec& spec) {
  const TrainConfig& cfg = spec.cfg;
  const MaskedAdjacency& adj = *spec.adj;
  const Index n = adj.n();
  const Index f = spec.feats != nullptr ? spec.feats->f() : 0;
  const bool classifier = spec.loss == LossKind::multitask;
  const Index classes = classifier ? spec.labels->num_classes() : 0;

  Rng init_rng = Rng::derive(cfg.seed, kInitStream);
  Rng rng = Rng::derive(cfg.seed, kTrainStream);
  ModelParams<float> params =
      ModelParams<float>::init(n + f, cfg.hidden_dim, cfg.embedding_dim, classes, init_rng);
  Adam<float> adam(params, {float(cfg.learning_rate)});
  EarlyStopping<float> stopper(cfg.patience);

  LossConfig lc;
  lc.average_feature_ce = cfg.average_feature_ce;
  if (!cfg.zeta_per_row) lc.zeta = compute_zeta(adj);

  ForwardOptions<float> opts;
  opts.training = true;
  opts.input_dropout = cfg.input_dropout;
  opts.hidden_dropout = cfg.hidden_dropout;
  opts.mvn_epsilon = float(cfg.mvn_epsilon);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));

  LoopOutcome out;
  out.zeta = lc.zeta;
  bool stopped = false;
  for (int epoch = 1; epoch <= cfg.epochs && !stopped; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    Index batches = 0;
    MatrixXf inputs, a_targets, mask, x_targets;
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index b = std::min<Index>(cfg.batch_size, n - start);
      const std::span<const Index> rows(order.data() + start, std::size_t(b));
      fill_batch(adj, spec.feats, rows, inputs, a_targets, mask,
                 spec.loss == LossKind::alpha_mbce ? &x_targets : nullptr);

      ForwardTrace<float> trace = forward_autoencoder(params, inputs, opts, &rng);
      if (classifier) forward_classifier(params, trace);

      MatrixXf d_a(n, b), d_x, d_class;
      if (spec.loss == LossKind::alpha_mbce) d_x.resize(f, b);
      if (classifier) d_class.resize(classes, b);

      const float inv_b = 1.0f / float(b);
      double batch_loss = 0.0;
      for (Index c = 0; c < b; ++c) {
        const Index row = rows[std::size_t(c)];
        if (cfg.zeta_per_row) lc.zeta = compute_zeta(adj, row);
        switch (spec.loss) {
          case LossKind::mbce: {
            const auto r = mbce<float>(a_targets.col(c), trace.out_logits.col(c), mask.col(c), lc);
            batch_loss += r.value;
            d_a.col(c) = r.d_logits * inv_b;
            break;
          }
          case LossKind::alpha_mbce: {
            AugmentedRow<float> arow{a_targets.col(c), x_targets.col(c), mask.col(c)};
            const auto r = alpha_mbce<float>(arow, trace.out_logits.col(c).head(n),
                                             trace.out_logits.col(c).tail(f), lc);
            batch_loss += r.value;
            d_a.col(c) = r.d_a_logits * inv_b;
            d_x.col(c) = r.d_x_logits * inv_b;
            break;
          }
          case LossKind::multitask: {
            std::optional<Index> label;
            if (spec.labels->train_mask(row)) label = spec.labels->label(row);
            const auto r = multitask_loss<float>(a_targets.col(c), trace.out_logits.col(c).head(n),
                                                 mask.col(c), label, trace.class_logits.col(c), lc);
            batch_loss += r.value;
            d_a.col(c) = r.d_a_logits * inv_b;
            d_class.col(c) = r.d_class_logits * inv_b;
            break;
          }
        }
      }
      epoch_loss += batch_loss / double(b);
      ++batches;

      const Gradients<float> grads =
          backward(params, trace, d_a, spec.loss == LossKind::alpha_mbce ? &d_x : nullptr,
                   classifier ? &d_class : nullptr, opts);
      adam.step(params, grads);
    }
    epoch_loss /= double(batches);
    if (!std::isfinite(epoch_loss)) {
      throw NumericError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
    }
    out.final_loss = epoch_loss;
    out.epochs_run = epoch;

    if (spec.val_metric) {
      const double metric = spec.val_metric(params);
      stopped = stopper.update(metric, params);
      if (cfg.verbose) {
        std::cout << "epoch " << epoch << " loss " << epoch_loss << " val " << metric
                  << (stopped ? " (early stop)" : "") << "\n";
      }
    } else if (cfg.verbose) {
      std::cout << "epoch " << epoch << " loss " << epoch_loss << "\n";
    }
  }

  if (stopper.has_snapshot()) {
    out.params = stopper.best_params();
    out.best_val = stopper.best_metric();
  } else {
    out.params = std::move(params);
  }
  return out;
}

void fill_config_report(Report& report, const TrainConfig& cfg, double zeta) {
  report.set("task", task_name(cfg.task));
  report.set("use_features", std::int64_t(cfg.use_features));
  report.set("seed", cfg.seed);
  report.set("epochs", std::int64_t(cfg.epochs));
  report.set("batch_size", std::int64_t(cfg.batch_size));
  report.set("input_dropout", cfg.input_dropout);
  report.set("hidden_dropout", cfg.hidden_dropout);
  report.set("learning_rate", format_sci(cfg.learning_rate));
  report.set("patience", std::int64_t(cfg.patience));
  report.set("hidden_dim", std::int64_t(cfg.hidden_dim));
  report.set("embedding_dim", std::int64_t(cfg.embedding_dim));
  report.set("mvn_epsilon", format_sci(cfg.mvn_epsilon));
  report.set("zeta_mode", cfg.zeta_per_row ? "per_row" : "global");
  if (!cfg.zeta_per_row) report.set("zeta", zeta);
  report.set("symmetrize_scores", std::int64_t(cfg.symmetrize_scores));
}

const FeatureMatrix* feature_ptr(const DatasetBundle& bundle, const TrainConfig& cfg) {
  if (!cfg.use_features) return nullptr;
  if (!bundle.features.has_value()) {
    throw DataError("use_features set but the dataset has no feature matrix");
  }
  return &*bundle.features;
}

double val_link_auc(const ModelParams<float>& params, const MaskedAdjacency& adj,
                    const FeatureMatrix* feats, const EdgeSplit& split, bool symmetrize) {
  std::vector<Dyad> pairs = split.val_pos;
  pairs.insert(pairs.end(), split.val_neg.begin(), split.val_neg.end());
  const std::vector<double> scores = score_pairs(params, adj, feats, pairs, symmetrize);
  std::vector<int> labels(pairs.size(), 0);
  std::fill(labels.begin(), labels.begin() + std::ptrdiff_t(split.val_pos.size()), 1);
  return roc_auc(scores, labels);
}

// 5% positive/negative holdout carved from the observed dyads, used as the
// early-stopping validation set in reconstruction mode.
std::pair<MaskedAdjacency, EdgeSplit> carve_validation(const MaskedAdjacency& adj, double frac,
                                                       Rng& rng) {
  std::vector<Dyad> positives = adj.offdiag_dyads(LinkState::present);
  rng.shuffle(positives);
  const auto count = std::size_t(std::floor(frac * double(positives.size())));
  EdgeSplit split;
  split.val_pos.assign(positives.begin(), positives.begin() + count);

  std::vector<Dyad> absents = adj.offdiag_dyads(LinkState::absent);
  rng.shuffle(absents);
  if (absents.size() < count) {
    throw std::runtime_error("carve_validation: not enough absent dyads");
  }
  split.val_neg.assign(absents.begin(), absents.begin() + count);
  return {apply_split(adj, split), std::move(split)};
}

}  // namespace

LinkEval evaluate_links(const ModelParams<float>& params, const MaskedAdjacency& adj,
                        const FeatureMatrix* feats, const std::vector<Dyad>& pos,
                        const std::vector<Dyad>& neg, bool symmetrize) {
  std::vector<Dyad> pairs = pos;
  pairs.insert(pairs.end(), neg.begin(), neg.end());
  const std::vector<double> scores = score_pairs(params, adj, feats, pairs, symmetrize);
  std::vector<int> labels(pairs.size(), 0);
  std::fill(labels.begin(), labels.begin() + std::ptrdiff_t(pos.size()), 1);
  return {roc_auc(scores, labels), average_precision(scores, labels)};
}

std::vector<Index> predict_labels(const ModelParams<float>& params, const MaskedAdjacency& adj,
                                  const FeatureMatrix* feats, const std::vector<Index>& nodes) {
  if (!params.has_classifier()) {
    throw std::invalid_argument("predict_labels: model has no classifier head");
  }
  std::vector<Index> out(nodes.size());
  const Index chunk = 128;
  ForwardOptions<float> opts;
  for (std::size_t start = 0; start < nodes.size(); start += std::size_t(chunk)) {
    const Index b = Index(std::min(std::size_t(chunk), nodes.size() - start));
    MatrixXf inputs(params.input_dim(), b);
    for (Index c = 0; c < b; ++c) {
      inputs.col(c) = augment_row<float>(adj, feats, nodes[start + std::size_t(c)]).concatenated();
    }
    ForwardTrace<float> trace = forward_autoencoder(params, inputs, opts);
    forward_classifier(params, trace);
    for (Index c = 0; c < b; ++c) {
      Index best = 0;
      trace.class_probs.col(c).maxCoeff(&best);
      out[start + std::size_t(c)] = best;
    }
  }
  return out;
}

double evaluate_accuracy(const ModelParams<float>& params, const MaskedAdjacency& adj,
                         const FeatureMatrix* feats, const LabelSet& labels, NodeSplit which) {
  const std::vector<Index> nodes = labels.nodes_in(which);
  if (nodes.empty()) {
    throw std::invalid_argument("evaluate_accuracy: no labeled nodes in the requested split");
  }
  const std::vector<Index> predicted = predict_labels(params, adj, feats, nodes);
  std::vector<int> pred(nodes.size()), truth(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    pred[k] = int(predicted[k]);
    truth[k] = int(*labels.label(nodes[k]));
  }
  return accuracy(pred, truth);
}

std::vector<Dyad> rank_all_dyads(const ModelParams<float>& params, const MaskedAdjacency& adj,
                                 const FeatureMatrix* feats, bool symmetrize) {
  const Index n = adj.n();
  MatrixXf logits(n, n);  // column i holds the adjacency slice of row i
  const Index chunk = 128;
  ForwardOptions<float> opts;
  for (Index start = 0; start < n; start += chunk) {
    const Index b = std::min(chunk, n - start);
    MatrixXf inputs(params.input_dim(), b);
    for (Index c = 0; c < b; ++c) {
      inputs.col(c) = augment_row<float>(adj, feats, start + c).concatenated();
    }
    const ForwardTrace<float> trace = forward_autoencoder(params, inputs, opts);
    logits.middleCols(start, b) = trace.out_logits.topRows(n);
  }

  struct Scored {
    float score;
    Dyad dyad;
  };
  std::vector<Scored> scored;
  scored.reserve(std::size_t(n) * (n - 1) / 2);
  auto prob = [](float logit) { return float(1.0 / (1.0 + std::exp(-double(logit)))); };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const float s = symmetrize ? 0.5f * (prob(logits(j, i)) + prob(logits(i, j)))
                                 : prob(logits(j, i));
      scored.push_back({s, Dyad(i, j)});
    }
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.dyad < b.dyad;
  });
  std::vector<Dyad> ranked(scored.size());
  for (std::size_t k = 0; k < scored.size(); ++k) ranked[k] = scored[k].dyad;
  return ranked;
}

std::vector<std::pair<Index, double>> precision_curve(const std::vector<Dyad>& ranked,
                                                      const MaskedAdjacency& truth,
                                                      const std::vector<Index>& k_grid) {
  std::vector<int> relevance(ranked.size());
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    relevance[k] = truth.entry(ranked[k].i, ranked[k].j) == LinkState::present ? 1 : 0;
  }
  std::vector<std::pair<Index, double>> curve;
  curve.reserve(k_grid.size());
  for (const Index k : k_grid) {
    if (k <= 0 || std::size_t(k) > ranked.size()) {
      throw std::invalid_argument("precision_curve: k " + std::to_string(k) +
                                  " exceeds candidate count " + std::to_string(ranked.size()));
    }
    curve.emplace_back(k, precision_at_k(relevance, std::size_t(k)));
  }
  return curve;
}

TrainResult run_link_prediction(const DatasetBundle& bundle, const EdgeSplit& split,
                                const TrainConfig& config) {
  TrainConfig cfg = config.resolved();
  if (cfg.task != Task::link_predict) {
    throw std::invalid_argument("run_link_prediction: config task is " + task_name(cfg.task));
  }
  const FeatureMatrix* feats = feature_ptr(bundle, cfg);
  const MaskedAdjacency train_adj = apply_split(bundle.adjacency, split);

  LoopSpec spec;
  spec.adj = &train_adj;
  spec.feats = feats;
  spec.loss = feats != nullptr ? LossKind::alpha_mbce : LossKind::mbce;
  spec.cfg = cfg;
  if (!split.val_pos.empty() && !split.val_neg.empty()) {
    spec.val_metric = [&](const ModelParams<float>& p) {
      return val_link_auc(p, train_adj, feats, split, cfg.symmetrize_scores);
    };
  }
  LoopOutcome out = train_loop(spec);

  TrainResult result;
  result.params = std::move(out.params);
  result.epochs_run = out.epochs_run;
  result.final_loss = out.final_loss;
  result.best_val_metric = out.best_val;
  const LinkEval eval = evaluate_links(result.params, train_adj, feats, split.test_pos,
                                       split.test_neg, cfg.symmetrize_scores);
  result.test_auc = eval.auc;
  result.test_ap = eval.ap;
  result.link_score = 0.5 * (eval.auc + eval.ap);

  fill_config_report(result.report, cfg, out.zeta);
  result.report.set("epochs_run", std::int64_t(result.epochs_run));
  result.report.set("final_loss", result.final_loss);
  if (spec.val_metric) result.report.set("best_val_auc", result.best_val_metric);
  result.report.set("test_auc", result.test_auc);
  result.report.set("test_ap", result.test_ap);
  return result;
}

TrainResult run_node_classification(const DatasetBundle& bundle, const TrainConfig& config) {
  TrainConfig cfg = config.resolved();
  if (cfg.task != Task::node_classify) {
    throw std::invalid_argument("run_node_classification: config task is " + task_name(cfg.task));
  }
  if (!bundle.labels.has_value()) {
    throw DataError("node classification requires a label file");
  }
  const FeatureMatrix* feats = feature_ptr(bundle, cfg);
  const LabelSet& labels = *bundle.labels;

  LoopSpec spec;
  spec.adj = &bundle.adjacency;
  spec.feats = feats;
  spec.labels = &labels;
  spec.loss = LossKind::multitask;
  spec.cfg = cfg;
  if (!labels.nodes_in(NodeSplit::val).empty()) {
    spec.val_metric = [&](const ModelParams<float>& p) {
      return evaluate_accuracy(p, bundle.adjacency, feats, labels, NodeSplit::val);
    };
  }
  LoopOutcome out = train_loop(spec);

  TrainResult result;
  result.params = std::move(out.params);
  result.epochs_run = out.epochs_run;
  result.final_loss = out.final_loss;
  result.best_val_metric = out.best_val;
  result.test_accuracy =
      evaluate_accuracy(result.params, bundle.adjacency, feats, labels, NodeSplit::test);

  fill_config_report(result.report, cfg, out.zeta);
  result.report.set("epochs_run", std::int64_t(result.epochs_run));
  result.report.set("final_loss", result.final_loss);
  if (spec.val_metric) result.report.set("best_val_accuracy", result.best_val_metric);
  result.report.set("test_accuracy", result.test_accuracy);
  return result;
}

TrainResult run_multitask(const DatasetBundle& bundle, const EdgeSplit& split,
                          const TrainConfig& config) {
  TrainConfig cfg = config.resolved();
  if (cfg.task != Task::multitask) {
    throw std::invalid_argument("run_multitask: config task is " + task_name(cfg.task));
  }
  if (!bundle.labels.has_value()) {
    throw DataError("multitask training requires a label file");
  }
  const FeatureMatrix* feats = feature_ptr(bundle, cfg);
  const LabelSet& labels = *bundle.labels;
  const MaskedAdjacency train_adj = apply_split(bundle.adjacency, split);

  const bool has_val_links = !split.val_pos.empty() && !split.val_neg.empty();
  const bool has_val_nodes = !labels.nodes_in(NodeSplit::val).empty();

  LoopSpec spec;
  spec.adj = &train_adj;
  spec.feats = feats;
  spec.labels = &labels;
  spec.loss = LossKind::multitask;
  spec.cfg = cfg;
  if (has_val_links || has_val_nodes) {
    spec.val_metric = [&](const ModelParams<float>& p) {
      double metric = 0.0;
      if (has_val_links) metric += val_link_auc(p, train_adj, feats, split, cfg.symmetrize_scores);
      if (has_val_nodes) metric += evaluate_accuracy(p, train_adj, feats, labels, NodeSplit::val);
      return metric;
    };
  }
  LoopOutcome out = train_loop(spec);

  TrainResult result;
  result.params = std::move(out.params);
  result.epochs_run = out.epochs_run;
  result.final_loss = out.final_loss;
  result.best_val_metric = out.best_val;
  const LinkEval eval = evaluate_links(result.params, train_adj, feats, split.test_pos,
                                       split.test_neg, cfg.symmetrize_scores);
  result.test_auc = eval.auc;
  result.test_ap = eval.ap;
  result.link_score = 0.5 * (eval.auc + eval.ap);
  const bool has_test_nodes = !labels.nodes_in(NodeSplit::test).empty();
  if (has_test_nodes) {
    result.test_accuracy =
        evaluate_accuracy(result.params, train_adj, feats, labels, NodeSplit::test);
  }

  fill_config_report(result.report, cfg, out.zeta);
  result.report.set("epochs_run", std::int64_t(result.epochs_run));
  result.report.set("final_loss", result.final_loss);
  if (spec.val_metric) result.report.set("best_val_metric", result.best_val_metric);
  result.report.set("test_auc", result.test_auc);
  result.report.set("test_ap", result.test_ap);
  result.report.set("link_score", result.link_score);
  if (has_test_nodes) result.report.set("test_accuracy", result.test_accuracy);
  return result;
}

ReconstructionResult run_reconstruction(const DatasetBundle& bundle, double remove_frac,
                                        const std::vector<Index>& k_grid,
                                        const TrainConfig& config) {
  TrainConfig cfg = config.resolved();
  if (cfg.task != Task::reconstruct) {
    throw std::invalid_argument("run_reconstruction: config task is " + task_name(cfg.task));
  }
  if (cfg.use_features) {
    throw std::invalid_argument("run_reconstruction: reconstruction is featureless");
  }
  for (std::size_t k = 1; k < k_grid.size(); ++k) {
    if (k_grid[k] <= k_grid[k - 1]) {
      throw std::invalid_argument("run_reconstruction: k grid must be ascending");
    }
  }

  Rng sampler = Rng::derive(cfg.seed, kDataStream);
  MaskedAdjacency degraded =
      remove_frac > 0.0 ? degrade_edges(bundle.adjacency, remove_frac, sampler)
                        : bundle.adjacency;

  // Early stopping needs a validation holdout carved from the observed dyads;
  // with patience >= epochs it can never trigger, so training keeps every
  // observed edge (the pure memorization setting).
  MaskedAdjacency train_adj = degraded;
  EdgeSplit holdout;
  if (cfg.patience < cfg.epochs) {
    std::tie(train_adj, holdout) = carve_validation(degraded, 0.05, sampler);
  }

  LoopSpec spec;
  spec.adj = &train_adj;
  spec.loss = LossKind::mbce;
  spec.cfg = cfg;
  if (!holdout.val_pos.empty()) {
    spec.val_metric = [&, &train_adj = train_adj, &holdout = holdout](const ModelParams<float>& p) {
      return val_link_auc(p, train_adj, nullptr, holdout, cfg.symmetrize_scores);
    };
  }
  LoopOutcome out = train_loop(spec);

  ReconstructionResult result;
  result.params = std::move(out.params);
  const std::vector<Dyad> ranked =
      rank_all_dyads(result.params, train_adj, nullptr, cfg.symmetrize_scores);
  result.curve = precision_curve(ranked, bundle.adjacency, k_grid);

  fill_config_report(result.report, cfg, out.zeta);
  result.report.set("remove_frac", remove_frac);
  result.report.set("epochs_run", std::int64_t(out.epochs_run));
  result.report.set("final_loss", out.final_loss);
  if (spec.val_metric) result.report.set("best_val_auc", out.best_val);
  const auto counts = bundle.adjacency.offdiag_dyad_counts();
  const double density =
      double(counts.present) / double(counts.present + counts.absent + counts.unknown);
  result.report.set("edge_count", std::int64_t(counts.present));
  result.report.set("density_baseline", density);
  for (const auto& [k, v] : result.curve) {
    result.report.set("precision_at_" + std::to_string(k), v);
  }
  return result;
}

}  // namespace longae
