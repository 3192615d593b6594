// longae: train, evaluate and apply local-neighborhood graph autoencoders
// from the command line.
//
// Subcommands: prepare (build edge splits), train, evaluate, predict,
// reconstruct. Flags mirror the TrainConfig fields; an ini-style config file
// of `key = value` lines overrides defaults, and flags override the config
// file. Every run logs its resolved configuration and seed.
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include "longae/io.hpp"
#include "longae/metrics.hpp"
#include "longae/model.hpp"
#include "longae/train.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace longae;

struct DataArgs {
  std::string dataset;
  std::string data_dir;
  std::string edges, feature_file, label_file;
  bool rescale_features = false;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset,
                    "Dataset name; resolves <data-dir>/<name>.{edges,features,labels}");
    cmd->add_option("--data-dir", data_dir,
                    "Dataset directory (default $LONGAE_DATA_DIR or ./data)");
    cmd->add_option("--edges", edges, "Edge list file (src<TAB>dst lines)");
    cmd->add_option("--feature-file", feature_file, "Node feature file");
    cmd->add_option("--label-file", label_file, "Node label file");
    cmd->add_flag("--rescale-features", rescale_features,
                  "Min-max rescale feature columns into [0,1]");
  }

  std::string resolved_dir() const {
    if (!data_dir.empty()) return data_dir;
    if (const char* env = std::getenv("LONGAE_DATA_DIR")) return env;
    return "data";
  }

  DatasetBundle load() const {
    std::string edge_path = edges;
    std::optional<std::string> feature_path, label_path;
    if (!feature_file.empty()) feature_path = feature_file;
    if (!label_file.empty()) label_path = label_file;
    if (!dataset.empty()) {
      // Layout convention: <data-dir>/<name>/<name>.{edges,features,labels}.
      const std::filesystem::path base =
          std::filesystem::path(resolved_dir()) / dataset / dataset;
      if (edge_path.empty()) edge_path = base.string() + ".edges";
      if (!feature_path && std::filesystem::exists(base.string() + ".features")) {
        feature_path = base.string() + ".features";
      }
      if (!label_path && std::filesystem::exists(base.string() + ".labels")) {
        label_path = base.string() + ".labels";
      }
    }
    if (edge_path.empty()) {
      throw DataError("no dataset given: pass --dataset <name> or --edges <file>");
    }
    LoadOptions options;
    options.rescale_features = rescale_features;
    return load_dataset(edge_path, feature_path, label_path, options);
  }
};

struct TrainArgs {
  TrainConfig cfg;
  std::string task = "lp";
  bool no_symmetrize = false;
  bool sum_feature_ce = false;

  void add_flags(CLI::App* cmd, bool with_task = true) {
    if (with_task) {
      cmd->add_option("--task", task, "Task: lp|nc|mt|recon (aliases accepted)")
          ->check([](const std::string& t) {
            return parse_task(t).has_value() ? std::string() : "unknown task: " + t;
          });
    }
    cmd->add_flag("--features", cfg.use_features, "Concatenate node features to the input");
    cmd->add_option("--epochs", cfg.epochs, "Training epochs (per-task default)");
    cmd->add_option("--batch-size", cfg.batch_size, "Mini-batch size (per-task default)");
    cmd->add_option("--input-dropout", cfg.input_dropout,
                    "Denoising dropout on the input row (per-task default)");
    cmd->add_option("--hidden-dropout", cfg.hidden_dropout, "Hidden-layer dropout rate");
    cmd->add_option("--lr", cfg.learning_rate, "Adam learning rate");
    cmd->add_option("--patience", cfg.patience, "Early-stopping patience in epochs");
    cmd->add_option("--seed", cfg.seed, "Seed for init, shuffling and dropout");
    cmd->add_flag("--zeta-per-row", cfg.zeta_per_row,
                  "Compute the class-balance weight per row instead of globally");
    cmd->add_flag("--no-symmetrize", no_symmetrize, "Score dyads from one row only");
    cmd->add_option("--hidden-dim", cfg.hidden_dim, "First hidden layer width");
    cmd->add_option("--embedding-dim", cfg.embedding_dim, "Embedding width");
    cmd->add_option("--mvn-epsilon", cfg.mvn_epsilon, "MVN variance epsilon");
    cmd->add_flag("--sum-feature-ce", sum_feature_ce,
                  "Sum the feature cross-entropy over F instead of averaging");
    cmd->add_flag("--verbose,-v", cfg.verbose, "Per-epoch progress on stdout");
  }

  TrainConfig config() const {
    TrainConfig out = cfg;
    out.task = *parse_task(task);
    out.symmetrize_scores = !no_symmetrize;
    out.average_feature_ce = !sum_feature_ce;
    return out;
  }
};

void print_report(const Report& report) {
  for (const auto& [k, v] : report.entries()) std::cout << k << "=" << v << "\n";
}

double mean_of(const std::vector<double>& v) {
  double sum = 0;
  for (double x : v) sum += x;
  return sum / double(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / double(v.size()));
}

std::vector<Dyad> load_pairs(const std::string& path, const DatasetBundle& bundle,
                             std::vector<std::pair<std::string, std::string>>& names) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  std::vector<Dyad> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected src<TAB>dst");
    }
    const std::string a = line.substr(0, tab);
    const std::string b = line.substr(tab + 1);
    pairs.emplace_back(bundle.node_id(a), bundle.node_id(b));
    names.emplace_back(a, b);
  }
  return pairs;
}

// Infer featureless vs augmented mode from the checkpoint dimensions.
const FeatureMatrix* match_checkpoint(const ModelParams<float>& params,
                                      const DatasetBundle& bundle) {
  const Index n = bundle.adjacency.n();
  if (params.input_dim() == n) return nullptr;
  if (bundle.features.has_value() && params.input_dim() == n + bundle.features->f()) {
    return &*bundle.features;
  }
  throw CheckpointError(CheckpointError::Code::dimension_mismatch,
                        "checkpoint input dim " + std::to_string(params.input_dim()) +
                            " matches neither " + std::to_string(n) + " (featureless) nor the "
                            "feature-augmented width of this dataset");
}

int cmd_prepare(const DataArgs& data, const std::string& protocol, double test_frac,
                double val_frac, double train_frac, std::uint64_t seed,
                const std::string& out_path) {
  const DatasetBundle bundle = data.load();
  Rng rng(seed);
  EdgeSplit split;
  if (protocol == "vgae") {
    split = make_vgae_split(bundle.adjacency, test_frac, val_frac, rng).second;
  } else if (protocol == "mf") {
    split = make_mf_split(bundle.adjacency, train_frac, rng).second;
  } else {
    throw CLI::ValidationError("--protocol", "must be vgae or mf");
  }
  split.seed = seed;
  write_split(out_path, split);
  std::cout << "protocol=" << protocol << "\nseed=" << seed << "\nsplit=" << out_path
            << "\ntest_pos=" << split.test_pos.size() << "\ntest_neg=" << split.test_neg.size()
            << "\nval_pos=" << split.val_pos.size() << "\nval_neg=" << split.val_neg.size()
            << "\ntrain_observed=" << split.train_observed.size() << "\n";
  return 0;
}

int cmd_train(const DataArgs& data, const TrainArgs& targs, const std::string& split_path,
              const std::string& protocol, double test_frac, double val_frac, double train_frac,
              int repeats, const std::string& checkpoint_path, const std::string& report_path) {
  const DatasetBundle bundle = data.load();
  TrainConfig cfg = targs.config();

  std::optional<EdgeSplit> fixed_split;
  if (!split_path.empty()) fixed_split = read_split(split_path);

  const bool needs_split = cfg.task == Task::link_predict || cfg.task == Task::multitask;
  if (needs_split && !fixed_split.has_value() && protocol.empty()) {
    throw DataError("task " + task_name(cfg.task) + " needs --split or --protocol");
  }

  std::vector<TrainResult> runs;
  Report report;
  for (int r = 0; r < repeats; ++r) {
    TrainConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + std::uint64_t(r);

    EdgeSplit split;
    if (needs_split) {
      if (fixed_split.has_value()) {
        split = *fixed_split;
      } else {
        // In-process protocol split; folds advance with the run seed.
        Rng rng(run_cfg.seed);
        if (protocol == "vgae") {
          split = make_vgae_split(bundle.adjacency, test_frac, val_frac, rng).second;
        } else if (protocol == "mf") {
          split = make_mf_split(bundle.adjacency, train_frac, rng).second;
        } else {
          throw CLI::ValidationError("--protocol", "must be vgae or mf");
        }
        split.seed = run_cfg.seed;
      }
    }

    TrainResult result;
    switch (cfg.task) {
      case Task::link_predict:
        result = run_link_prediction(bundle, split, run_cfg);
        break;
      case Task::node_classify:
        result = run_node_classification(bundle, run_cfg);
        break;
      case Task::multitask:
        result = run_multitask(bundle, split, run_cfg);
        break;
      case Task::reconstruct:
        throw DataError("use the reconstruct subcommand for the reconstruction task");
    }
    if (repeats == 1) {
      report = result.report;
    } else {
      const std::string tag = "_run" + std::to_string(r);
      if (result.report.has("test_auc")) report.set("test_auc" + tag, result.test_auc);
      if (result.report.has("test_ap")) report.set("test_ap" + tag, result.test_ap);
      if (result.report.has("test_accuracy")) {
        report.set("test_accuracy" + tag, result.test_accuracy);
      }
      if (result.report.has("link_score")) report.set("link_score" + tag, result.link_score);
    }
    runs.push_back(std::move(result));
  }

  if (repeats > 1) {
    auto aggregate = [&](const std::string& key, auto getter) {
      if (!runs.front().report.has(key)) return;
      std::vector<double> values;
      for (const TrainResult& r : runs) values.push_back(getter(r));
      report.set(key + "_mean", mean_of(values));
      report.set(key + "_std", std_of(values));
    };
    report.set("repeats", std::int64_t(repeats));
    report.set("base_seed", cfg.seed);
    aggregate("test_auc", [](const TrainResult& r) { return r.test_auc; });
    aggregate("test_ap", [](const TrainResult& r) { return r.test_ap; });
    aggregate("test_accuracy", [](const TrainResult& r) { return r.test_accuracy; });
    aggregate("link_score", [](const TrainResult& r) { return r.link_score; });
  }

  if (!checkpoint_path.empty()) {
    // With repeats, the last run's weights are saved; the report records it.
    save_checkpoint(checkpoint_path, runs.back().params);
    report.set("checkpoint", checkpoint_path);
    report.set("checkpoint_seed", runs.back().report.get("seed"));
  }
  if (!report_path.empty()) write_report(report_path, report);
  print_report(report);
  return 0;
}

int cmd_evaluate(const DataArgs& data, const std::string& checkpoint_path,
                 const std::string& split_path, bool symmetrize,
                 const std::string& report_path) {
  const DatasetBundle bundle = data.load();
  const ModelParams<float> params = load_checkpoint(checkpoint_path);
  const FeatureMatrix* feats = match_checkpoint(params, bundle);
  const EdgeSplit split = read_split(split_path);
  const MaskedAdjacency train_adj = apply_split(bundle.adjacency, split);

  Report report;
  report.set("checkpoint", checkpoint_path);
  report.set("split", split_path);
  report.set("symmetrize_scores", std::int64_t(symmetrize));
  if (!split.test_pos.empty() && !split.test_neg.empty()) {
    const LinkEval eval =
        evaluate_links(params, train_adj, feats, split.test_pos, split.test_neg, symmetrize);
    report.set("test_auc", eval.auc);
    report.set("test_ap", eval.ap);
    report.set("link_score", 0.5 * (eval.auc + eval.ap));
  }
  if (params.has_classifier() && bundle.labels.has_value() &&
      !bundle.labels->nodes_in(NodeSplit::test).empty()) {
    report.set("test_accuracy",
               evaluate_accuracy(params, train_adj, feats, *bundle.labels, NodeSplit::test));
  }
  if (!report_path.empty()) write_report(report_path, report);
  print_report(report);
  return 0;
}

int cmd_predict(const DataArgs& data, const std::string& checkpoint_path,
                const std::string& pairs_path, bool symmetrize, const std::string& out_path) {
  const DatasetBundle bundle = data.load();
  const ModelParams<float> params = load_checkpoint(checkpoint_path);
  const FeatureMatrix* feats = match_checkpoint(params, bundle);

  std::vector<std::pair<std::string, std::string>> names;
  const std::vector<Dyad> pairs = load_pairs(pairs_path, bundle, names);
  const std::vector<double> scores =
      score_pairs(params, bundle.adjacency, feats, pairs, symmetrize);

  std::vector<ScoredDyad> rows;
  rows.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    rows.push_back({names[k].first, names[k].second, scores[k]});
  }
  write_predictions(out_path, rows);
  std::cout << "pairs=" << rows.size() << "\nscores=" << out_path << "\n";
  return 0;
}

int cmd_reconstruct(const DataArgs& data, const TrainArgs& targs, double remove_frac,
                    const std::vector<Index>& k_grid, const std::string& curve_path,
                    const std::string& report_path, const std::string& checkpoint_path) {
  const DatasetBundle bundle = data.load();
  TrainConfig cfg = targs.config();
  cfg.task = Task::reconstruct;

  std::vector<Index> grid = k_grid;
  if (grid.empty()) {
    const auto counts = bundle.adjacency.offdiag_dyad_counts();
    grid.push_back(std::max<Index>(1, Index(counts.present)));
  }
  const ReconstructionResult result = run_reconstruction(bundle, remove_frac, grid, cfg);
  if (!curve_path.empty()) write_curve(curve_path, result.curve);
  if (!checkpoint_path.empty()) save_checkpoint(checkpoint_path, result.params);
  if (!report_path.empty()) write_report(report_path, result.report);
  print_report(result.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local-neighborhood graph autoencoder for link prediction, node "
               "classification and reconstruction"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file of key = value lines");
  // Parent options (--config) may appear after the subcommand name.
  app.fallthrough();

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Build a train/val/test edge split");
  DataArgs prepare_data;
  prepare_data.add_flags(prepare);
  std::string protocol = "vgae";
  double test_frac = 0.1, val_frac = 0.05, train_frac = 0.1;
  std::uint64_t prepare_seed = 20;
  std::string prepare_out = "split.txt";
  prepare->add_option("--protocol", protocol, "vgae (held-out positives+negatives) or mf");
  prepare->add_option("--test-frac", test_frac, "Fraction of positives held out for test");
  prepare->add_option("--val-frac", val_frac, "Fraction of positives held out for validation");
  prepare->add_option("--train-frac", train_frac, "MF protocol: fraction of dyads kept observed");
  prepare->add_option("--seed", prepare_seed, "Split sampling seed");
  prepare->add_option("--out", prepare_out, "Split file to write")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a model and report test metrics");
  DataArgs train_data;
  train_data.add_flags(train);
  TrainArgs train_args;
  train_args.add_flags(train);
  std::string train_split, train_protocol;
  double t_test_frac = 0.1, t_val_frac = 0.05, t_train_frac = 0.1;
  int repeats = 1;
  std::string checkpoint_path, report_path;
  train->add_option("--split", train_split, "Fixed split file from prepare");
  train->add_option("--protocol", train_protocol,
                    "Build splits in-process per repeat: vgae or mf");
  train->add_option("--test-frac", t_test_frac, "In-process vgae test fraction");
  train->add_option("--val-frac", t_val_frac, "In-process vgae validation fraction");
  train->add_option("--train-frac", t_train_frac, "In-process mf observed fraction");
  train->add_option("--repeats", repeats, "Repeat runs with seeds seed..seed+R-1")
      ->check(CLI::PositiveNumber);
  train->add_option("--checkpoint", checkpoint_path, "Checkpoint file to write");
  train->add_option("--report", report_path, "Report file to write");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a split");
  DataArgs eval_data;
  eval_data.add_flags(evaluate);
  std::string eval_checkpoint, eval_split, eval_report;
  bool eval_no_symmetrize = false;
  evaluate->add_option("--checkpoint", eval_checkpoint, "Checkpoint file")->required();
  evaluate->add_option("--split", eval_split, "Split file")->required();
  evaluate->add_flag("--no-symmetrize", eval_no_symmetrize, "Score dyads from one row only");
  evaluate->add_option("--report", eval_report, "Report file to write");

  // predict
  auto* predict = app.add_subcommand("predict", "Score a dyad list from a checkpoint");
  DataArgs predict_data;
  predict_data.add_flags(predict);
  std::string predict_checkpoint, pairs_path, predict_out = "scores.tsv";
  bool predict_no_symmetrize = false;
  predict->add_option("--checkpoint", predict_checkpoint, "Checkpoint file")->required();
  predict->add_option("--pairs", pairs_path, "Pair file (src<TAB>dst lines)")->required();
  predict->add_flag("--no-symmetrize", predict_no_symmetrize, "Score dyads from one row only");
  predict->add_option("--out", predict_out, "Score table to write");

  // reconstruct
  auto* reconstruct = app.add_subcommand("reconstruct", "Precision@k reconstruction experiment");
  DataArgs recon_data;
  recon_data.add_flags(reconstruct);
  TrainArgs recon_args;
  recon_args.task = "recon";
  recon_args.add_flags(reconstruct, /*with_task=*/false);
  double remove_frac = 0.0;
  std::vector<Index> k_grid;
  std::string curve_path, recon_report, recon_checkpoint;
  reconstruct->add_option("--remove-frac", remove_frac, "Fraction of edges masked before training");
  reconstruct->add_option("--k-grid", k_grid, "Ascending k values for precision@k")
      ->delimiter(',');
  reconstruct->add_option("--curve", curve_path, "Curve file of k<TAB>precision rows");
  reconstruct->add_option("--report", recon_report, "Report file to write");
  reconstruct->add_option("--checkpoint", recon_checkpoint, "Checkpoint file to write");

  try {
    app.parse(argc, argv);
    if (prepare->parsed()) {
      return cmd_prepare(prepare_data, protocol, test_frac, val_frac, train_frac, prepare_seed,
                         prepare_out);
    }
    if (train->parsed()) {
      return cmd_train(train_data, train_args, train_split, train_protocol, t_test_frac,
                       t_val_frac, t_train_frac, repeats, checkpoint_path, report_path);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_data, eval_checkpoint, eval_split, !eval_no_symmetrize,
                          eval_report);
    }
    if (predict->parsed()) {
      return cmd_predict(predict_data, predict_checkpoint, pairs_path, !predict_no_symmetrize,
                         predict_out);
    }
    if (reconstruct->parsed()) {
      return cmd_reconstruct(recon_data, recon_args, remove_frac, k_grid, curve_path,
                             recon_report, recon_checkpoint);
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
