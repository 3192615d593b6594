#pragma once

#include "longae/graph.hpp"
#include "longae/io.hpp"
#include "longae/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace longae {

enum class Task { reconstruct, link_predict, node_classify, multitask };

std::string task_name(Task task);
std::optional<Task> parse_task(const std::string& name);

struct TrainConfig {
  Task task = Task::link_predict;
  bool use_features = false;
  int epochs = -1;              // -1: per-task default (50 lp/recon, 100 nc/mt)
  int batch_size = -1;          // -1: per-task default (8 lp/recon, 64 nc/mt)
  double input_dropout = -1.0;  // -1: per-task default (0.2, but 0 for nc)
  double hidden_dropout = 0.5;
  double learning_rate = 1e-3;
  int patience = 5;
  std::uint64_t seed = 1;
  bool zeta_per_row = false;
  bool symmetrize_scores = true;
  double mvn_epsilon = 1e-8;
  bool average_feature_ce = true;
  Index hidden_dim = 256;
  Index embedding_dim = 128;
  bool verbose = false;

  // Fills the per-task defaults and validates ranges.
  TrainConfig resolved() const;
};

struct TrainResult {
  ModelParams<float> params;
  Report report;
  int epochs_run = 0;
  double final_loss = 0.0;
  double best_val_metric = 0.0;
  double test_auc = 0.0;
  double test_ap = 0.0;
  double test_accuracy = 0.0;
  double link_score = 0.0;  // (auc + ap) / 2, multitask headline
};

// Trains with MBCE (featureless) or the feature-augmented loss, early-stops
// on validation AUC over the split's val dyads, and evaluates AUC/AP on the
// test dyads. Held-out dyads are masked unknown before training.
TrainResult run_link_prediction(const DatasetBundle& bundle, const EdgeSplit& split,
                                const TrainConfig& config);

// Joint objective on the full observed adjacency: MBCE on every row plus
// softmax cross-entropy on train-labeled rows; early-stops on validation
// accuracy and reports test accuracy.
TrainResult run_node_classification(const DatasetBundle& bundle, const TrainConfig& config);

// Single joint run on an incomplete graph: link prediction on the split's
// test dyads (combined (AUC+AP)/2) plus node classification accuracy.
TrainResult run_multitask(const DatasetBundle& bundle, const EdgeSplit& split,
                          const TrainConfig& config);

struct ReconstructionResult {
  ModelParams<float> params;
  Report report;
  std::vector<std::pair<Index, double>> curve;  // (k, precision@k)
};

// Featureless reconstruction: optionally degrades the graph, trains with a
// small carved validation holdout for early stopping, then ranks all
// off-diagonal dyads and scores precision@k against the original edge set.
ReconstructionResult run_reconstruction(const DatasetBundle& bundle, double remove_frac,
                                        const std::vector<Index>& k_grid,
                                        const TrainConfig& config);

// Evaluation helpers shared by the protocols, the CLI and the test suites.
struct LinkEval {
  double auc = 0.0;
  double ap = 0.0;
};

LinkEval evaluate_links(const ModelParams<float>& params, const MaskedAdjacency& adj,
                        const FeatureMatrix* feats, const std::vector<Dyad>& pos,
                        const std::vector<Dyad>& neg, bool symmetrize);

std::vector<Index> predict_labels(const ModelParams<float>& params, const MaskedAdjacency& adj,
                                  const FeatureMatrix* feats, const std::vector<Index>& nodes);

double evaluate_accuracy(const ModelParams<float>& params, const MaskedAdjacency& adj,
                         const FeatureMatrix* feats, const LabelSet& labels, NodeSplit which);

// All off-diagonal dyads ranked by symmetrized score, descending, ties broken
// by dyad order.
std::vector<Dyad> rank_all_dyads(const ModelParams<float>& params, const MaskedAdjacency& adj,
                                 const FeatureMatrix* feats, bool symmetrize);

// precision@k of a ranking against the positive dyads of a reference
// adjacency, for each k in the ascending grid.
std::vector<std::pair<Index, double>> precision_curve(const std::vector<Dyad>& ranked,
                                                      const MaskedAdjacency& truth,
                                                      const std::vector<Index>& k_grid);

}  // namespace longae
