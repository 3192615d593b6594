#pragma once

#include "longae/types.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace longae {

enum class LinkState : std::uint8_t { absent = 0, present = 1, unknown = 2 };

// Unordered off-diagonal node pair, canonicalized to i < j.
struct Dyad {
  Index i = 0;
  Index j = 0;
  Dyad() = default;
  Dyad(Index a, Index b) : i(std::min(a, b)), j(std::max(a, b)) {}
  friend bool operator==(const Dyad&, const Dyad&) = default;
  friend auto operator<=>(const Dyad&, const Dyad&) = default;
};

struct ObservedDyad {
  Dyad dyad;
  std::uint8_t value = 0;  // 1 present, 0 absent
  friend bool operator==(const ObservedDyad&, const ObservedDyad&) = default;
};

// Symmetric adjacency over {present, absent, unknown} with the diagonal
// forced to present (every node connected to itself). Dense byte per entry;
// memory is n^2 bytes, sized for graphs up to ~25k nodes. Builders mutate
// through set(); once built, instances are read-only in practice and safe to
// share across threads.
class MaskedAdjacency {
 public:
  MaskedAdjacency() = default;

  explicit MaskedAdjacency(Index n) : n_(n), cells_(std::size_t(n) * n, 0) {
    for (Index i = 0; i < n; ++i) cell(i, i) = std::uint8_t(LinkState::present);
  }

  Index n() const { return n_; }

  LinkState entry(Index i, Index j) const {
    check_node(i);
    check_node(j);
    return LinkState(cell(i, j));
  }

  bool observed(Index i, Index j) const { return entry(i, j) != LinkState::unknown; }

  // Writes both orientations. The diagonal is fixed at present.
  void set(Index i, Index j, LinkState s) {
    check_node(i);
    check_node(j);
    if (i == j && s != LinkState::present) {
      throw std::invalid_argument("MaskedAdjacency: diagonal entries are fixed at present");
    }
    cell(i, j) = std::uint8_t(s);
    cell(j, i) = std::uint8_t(s);
  }

  bool fully_observed() const {
    return std::none_of(cells_.begin(), cells_.end(), [](std::uint8_t c) {
      return c == std::uint8_t(LinkState::unknown);
    });
  }

  struct Counts {
    std::int64_t present = 0;
    std::int64_t absent = 0;
    std::int64_t unknown = 0;
  };

  // Off-diagonal counts over unordered dyads (each pair counted once).
  Counts offdiag_dyad_counts() const {
    Counts c;
    for (Index i = 0; i < n_; ++i) {
      for (Index j = i + 1; j < n_; ++j) {
        bump(c, LinkState(cell(i, j)));
      }
    }
    return c;
  }

  Counts row_offdiag_counts(Index i) const {
    check_node(i);
    Counts c;
    for (Index j = 0; j < n_; ++j) {
      if (j == i) continue;
      bump(c, LinkState(cell(i, j)));
    }
    return c;
  }

  // Off-diagonal dyads in a given state, in deterministic scan order (i < j).
  std::vector<Dyad> offdiag_dyads(LinkState state) const {
    std::vector<Dyad> out;
    for (Index i = 0; i < n_; ++i) {
      for (Index j = i + 1; j < n_; ++j) {
        if (LinkState(cell(i, j)) == state) out.emplace_back(i, j);
      }
    }
    return out;
  }

  // Row i as model input (unknown imputed to 0) and its observation mask.
  template <typename Scalar>
  void fill_row(Index i, Eigen::Ref<VectorX<Scalar>> values,
                Eigen::Ref<VectorX<Scalar>> mask) const {
    check_node(i);
    for (Index j = 0; j < n_; ++j) {
      const LinkState s = LinkState(cell(i, j));
      values[j] = s == LinkState::present ? Scalar(1) : Scalar(0);
      mask[j] = s == LinkState::unknown ? Scalar(0) : Scalar(1);
    }
  }

  friend bool operator==(const MaskedAdjacency&, const MaskedAdjacency&) = default;

 private:
  std::uint8_t& cell(Index i, Index j) { return cells_[std::size_t(i) * n_ + j]; }
  std::uint8_t cell(Index i, Index j) const { return cells_[std::size_t(i) * n_ + j]; }

  void check_node(Index i) const {
    if (i < 0 || i >= n_) {
      throw std::out_of_range("MaskedAdjacency: node index " + std::to_string(i) +
                              " out of range [0," + std::to_string(n_) + ")");
    }
  }

  static void bump(Counts& c, LinkState s) {
    switch (s) {
      case LinkState::present: ++c.present; break;
      case LinkState::absent: ++c.absent; break;
      case LinkState::unknown: ++c.unknown; break;
    }
  }

  Index n_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Node side-features in [0,1], stored one column per node.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  // values: f x n, column per node. Every entry must be within [0,1].
  explicit FeatureMatrix(MatrixXf values) : values_(std::move(values)) {
    if (values_.size() > 0 &&
        (values_.minCoeff() < 0.0f || values_.maxCoeff() > 1.0f)) {
      throw std::invalid_argument("FeatureMatrix: values must lie in [0,1]");
    }
  }

  Index n() const { return values_.cols(); }
  Index f() const { return values_.rows(); }
  float value(Index node, Index k) const { return values_(k, node); }
  const MatrixXf& columns() const { return values_; }

 private:
  MatrixXf values_;
};

enum class NodeSplit : std::uint8_t { none = 0, train = 1, val = 2, test = 3 };

// Per-node class labels with train/val/test membership. The training mask is
// 1 exactly for labeled nodes in the train split.
class LabelSet {
 public:
  LabelSet() = default;

  LabelSet(std::vector<std::string> classes, std::vector<std::int32_t> labels,
           std::vector<NodeSplit> splits)
      : classes_(std::move(classes)), labels_(std::move(labels)), splits_(std::move(splits)) {
    if (labels_.size() != splits_.size()) {
      throw std::invalid_argument("LabelSet: labels/splits size mismatch");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] >= std::int32_t(classes_.size())) {
        throw std::invalid_argument("LabelSet: label index out of range at node " +
                                    std::to_string(i));
      }
      if (labels_[i] < 0 && splits_[i] != NodeSplit::none) {
        throw std::invalid_argument("LabelSet: node " + std::to_string(i) +
                                    " in a split but unlabeled");
      }
    }
  }

  Index n() const { return Index(labels_.size()); }
  Index num_classes() const { return Index(classes_.size()); }
  const std::vector<std::string>& classes() const { return classes_; }

  std::optional<Index> label(Index i) const {
    const std::int32_t v = labels_.at(std::size_t(i));
    if (v < 0) return std::nullopt;
    return Index(v);
  }

  NodeSplit split(Index i) const { return splits_.at(std::size_t(i)); }

  bool train_mask(Index i) const {
    return split(i) == NodeSplit::train && labels_.at(std::size_t(i)) >= 0;
  }

  std::vector<Index> nodes_in(NodeSplit s) const {
    std::vector<Index> out;
    for (Index i = 0; i < n(); ++i) {
      if (splits_[std::size_t(i)] == s && labels_[std::size_t(i)] >= 0) out.push_back(i);
    }
    return out;
  }

 private:
  std::vector<std::string> classes_;
  std::vector<std::int32_t> labels_;  // -1 when unlabeled
  std::vector<NodeSplit> splits_;
};

// Model input for one node: adjacency row with unknowns imputed to 0, the
// feature row, and the observation mask aligned with the adjacency part.
template <typename Scalar>
struct AugmentedRow {
  VectorX<Scalar> a_part;
  VectorX<Scalar> x_part;
  VectorX<Scalar> mask;

  VectorX<Scalar> concatenated() const {
    VectorX<Scalar> out(a_part.size() + x_part.size());
    out.head(a_part.size()) = a_part;
    out.tail(x_part.size()) = x_part;
    return out;
  }
};

template <typename Scalar = float>
AugmentedRow<Scalar> augment_row(const MaskedAdjacency& adj, const FeatureMatrix* feats,
                                 Index i) {
  if (feats != nullptr && feats->n() != adj.n()) {
    throw std::invalid_argument("augment_row: feature node count " +
                                std::to_string(feats->n()) + " != adjacency " +
                                std::to_string(adj.n()));
  }
  AugmentedRow<Scalar> row;
  row.a_part.resize(adj.n());
  row.mask.resize(adj.n());
  adj.fill_row<Scalar>(i, row.a_part, row.mask);
  if (feats != nullptr && feats->f() > 0) {
    row.x_part = feats->columns().col(i).cast<Scalar>();
  } else {
    row.x_part.resize(0);
  }
  return row;
}

// Train/val/test dyad partition plus the seed that produced it. The four
// held-out lists are pairwise disjoint and never include diagonal pairs;
// train_observed is used by the matrix-completion protocol and may be empty.
struct EdgeSplit {
  std::uint64_t seed = 0;
  std::vector<ObservedDyad> train_observed;
  std::vector<Dyad> val_pos;
  std::vector<Dyad> val_neg;
  std::vector<Dyad> test_pos;
  std::vector<Dyad> test_neg;

  std::vector<Dyad> held_out() const {
    std::vector<Dyad> out;
    out.reserve(val_pos.size() + val_neg.size() + test_pos.size() + test_neg.size());
    out.insert(out.end(), val_pos.begin(), val_pos.end());
    out.insert(out.end(), val_neg.begin(), val_neg.end());
    out.insert(out.end(), test_pos.begin(), test_pos.end());
    out.insert(out.end(), test_neg.begin(), test_neg.end());
    return out;
  }
};

// Symmetrized adjacency from an edge list: both directions set present,
// diagonal forced present, everything else absent (fully observed).
MaskedAdjacency build_adjacency(const std::vector<std::pair<Index, Index>>& edges, Index n);

// Holds out test_frac of the off-diagonal positive dyads plus an equal count
// of sampled negatives (likewise val_frac for validation); held-out dyads
// become unknown in the returned training adjacency. Fractional counts floor.
std::pair<MaskedAdjacency, EdgeSplit> make_vgae_split(const MaskedAdjacency& adj,
                                                      double test_frac, double val_frac,
                                                      Rng& rng);

// Matrix-completion protocol: keeps train_frac of ALL off-diagonal dyads
// (both classes) observed for training; the complement is recorded with its
// ground truth as the evaluation set and masked unknown for training.
std::pair<MaskedAdjacency, EdgeSplit> make_mf_split(const MaskedAdjacency& adj,
                                                    double train_frac, Rng& rng);

// Masks remove_frac of the off-diagonal positive dyads to unknown.
MaskedAdjacency degrade_edges(const MaskedAdjacency& adj, double remove_frac, Rng& rng);

// Masks every held-out dyad of the split to unknown.
MaskedAdjacency apply_split(const MaskedAdjacency& adj, const EdgeSplit& split);

// Re-inserts every held-out dyad with its ground-truth value; inverse of
// apply_split.
MaskedAdjacency restore_split(const MaskedAdjacency& adj, const EdgeSplit& split);

}  // namespace longae
