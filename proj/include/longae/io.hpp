#pragma once

#include "longae/graph.hpp"
#include "longae/model.hpp"
#include "longae/types.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace longae {

// File or content problem in user-supplied data; messages carry file and line
// where applicable. Readers reject rather than repair malformed input.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite value.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointError : DataError {
  enum class Code { bad_magic, bad_version, truncated, dimension_mismatch, io };
  CheckpointError(Code c, const std::string& msg) : DataError(msg), code(c) {}
  Code code;
};

struct DatasetStats {
  Index nodes = 0;
  Index features = 0;
  Index classes = 0;
  double average_degree = 0.0;   // off-diagonal, 2|E|/N
  double imbalance_ratio = 0.0;  // observed absent / observed present, off-diagonal
  double label_rate = 0.0;       // train-labeled nodes / N
};

// A loaded dataset: node name <-> index map in first-seen order, adjacency,
// optional features and labels, and summary stats recomputed from the loaded
// data (never trusted from files).
struct DatasetBundle {
  std::vector<std::string> node_names;
  std::unordered_map<std::string, Index> node_index;
  MaskedAdjacency adjacency;
  std::optional<FeatureMatrix> features;
  std::optional<LabelSet> labels;
  DatasetStats stats;

  Index node_id(const std::string& name) const {
    const auto it = node_index.find(name);
    if (it == node_index.end()) {
      throw DataError("unknown node id '" + name + "'");
    }
    return it->second;
  }
};

struct LoadOptions {
  // Min-max rescale each feature column into [0,1] instead of rejecting
  // out-of-range values.
  bool rescale_features = false;
};

// Formats (UTF-8 text, '#' comments and blank lines ignored):
//   edges:    src<TAB>dst
//   features: node_id<TAB>v1,v2,...,vF     (F constant across lines)
//   labels:   node_id<TAB>class_name<TAB>split, split in {train,val,test,none}
// Node indices are assigned in first-seen order over the edge file, then the
// feature and label files.
DatasetBundle load_dataset(const std::string& edge_path,
                           const std::optional<std::string>& feature_path = std::nullopt,
                           const std::optional<std::string>& label_path = std::nullopt,
                           const LoadOptions& options = {});

// Versioned binary checkpoint: magic "LGAE", u32 version, u32 dims
// {input_dim, hidden_dim, embedding_dim, num_classes}, then tensors in
// visit_tensors order as little-endian f32, matrices row by row.
void save_checkpoint(const std::string& path, const ModelParams<float>& params);

struct CheckpointDims {
  Index input_dim = 0;
  Index hidden_dim = 0;
  Index embedding_dim = 0;
  Index num_classes = 0;
};

ModelParams<float> load_checkpoint(const std::string& path,
                                   const std::optional<CheckpointDims>& expected = std::nullopt);

// Split file: header line seed=<u64>, then sections [train_observed]
// [val_pos] [val_neg] [test_pos] [test_neg] with lines i<TAB>j<TAB>value.
// Reading validates disjointness and rejects diagonal dyads.
void write_split(const std::string& path, const EdgeSplit& split);
EdgeSplit read_split(const std::string& path);

// Ordered key=value report; values are preformatted strings so identical runs
// serialize byte-identically.
class Report {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);       // fixed 6 decimals
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, std::uint64_t value);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_report(const std::string& path, const Report& report);

// Per-dyad score table, one `i<TAB>j<TAB>score` row per pair.
struct ScoredDyad {
  std::string i;
  std::string j;
  double score = 0.0;
};
void write_predictions(const std::string& path, const std::vector<ScoredDyad>& rows);

// precision@k curve as k<TAB>value rows; k must be strictly increasing.
void write_curve(const std::string& path,
                 const std::vector<std::pair<Index, double>>& curve);

}  // namespace longae
