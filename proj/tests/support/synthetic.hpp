#pragma once

// Seeded synthetic graphs and datasets used across the test suites.

#include "longae/graph.hpp"
#include "longae/io.hpp"
#include "longae/types.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace longae::testing {

using EdgeList = std::vector<std::pair<Index, Index>>;

// Stochastic block model over consecutive blocks.
inline EdgeList make_sbm(Rng& rng, const std::vector<Index>& block_sizes, double p_in,
                         double p_out) {
  std::vector<Index> block_of;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    for (Index k = 0; k < block_sizes[b]; ++k) block_of.push_back(Index(b));
  }
  const Index n = Index(block_of.size());
  EdgeList edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double p = block_of[std::size_t(i)] == block_of[std::size_t(j)] ? p_in : p_out;
      if (rng.uniform() < p) edges.emplace_back(i, j);
    }
  }
  return edges;
}

// Two disjoint k-cliques (nodes [0,k) and [k,2k)).
inline EdgeList make_clique_pair(Index k) {
  EdgeList edges;
  for (Index base : {Index(0), k}) {
    for (Index i = 0; i < k; ++i) {
      for (Index j = i + 1; j < k; ++j) edges.emplace_back(base + i, base + j);
    }
  }
  return edges;
}

// num_edges distinct random off-diagonal dyads.
inline EdgeList make_random_graph(Rng& rng, Index n, Index num_edges) {
  std::set<std::pair<Index, Index>> chosen;
  while (Index(chosen.size()) < num_edges) {
    const Index i = Index(rng.below(std::uint64_t(n)));
    const Index j = Index(rng.below(std::uint64_t(n)));
    if (i == j) continue;
    chosen.emplace(std::min(i, j), std::max(i, j));
  }
  return EdgeList(chosen.begin(), chosen.end());
}

inline std::vector<Index> block_membership(const std::vector<Index>& block_sizes) {
  std::vector<Index> out;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    for (Index k = 0; k < block_sizes[b]; ++k) out.push_back(Index(b));
  }
  return out;
}

// Noisy one-hot block indicators as node features.
inline FeatureMatrix make_indicator_features(const std::vector<Index>& membership,
                                             Index num_blocks, double flip_prob, Rng& rng) {
  MatrixXf values = MatrixXf::Zero(num_blocks, Index(membership.size()));
  for (std::size_t i = 0; i < membership.size(); ++i) {
    Index block = membership[i];
    if (rng.uniform() < flip_prob) {
      block = Index(rng.below(std::uint64_t(num_blocks)));
    }
    values(block, Index(i)) = 1.0f;
  }
  return FeatureMatrix(values);
}

// Labels from block membership with per-class train/val counts; the remainder
// becomes the test split.
inline LabelSet make_block_labels(const std::vector<Index>& membership, Index num_blocks,
                                  Index train_per_class, Index val_per_class) {
  std::vector<std::string> classes;
  for (Index c = 0; c < num_blocks; ++c) classes.push_back("c" + std::to_string(c));
  std::vector<std::int32_t> labels(membership.size());
  std::vector<NodeSplit> splits(membership.size(), NodeSplit::test);
  std::vector<Index> train_used(std::size_t(num_blocks), 0);
  std::vector<Index> val_used(std::size_t(num_blocks), 0);
  for (std::size_t i = 0; i < membership.size(); ++i) {
    const Index c = membership[i];
    labels[i] = std::int32_t(c);
    if (train_used[std::size_t(c)] < train_per_class) {
      splits[i] = NodeSplit::train;
      ++train_used[std::size_t(c)];
    } else if (val_used[std::size_t(c)] < val_per_class) {
      splits[i] = NodeSplit::val;
      ++val_used[std::size_t(c)];
    }
  }
  return LabelSet(std::move(classes), std::move(labels), std::move(splits));
}

inline DatasetBundle make_bundle(const EdgeList& edges, Index n,
                                 std::optional<FeatureMatrix> feats = std::nullopt,
                                 std::optional<LabelSet> labels = std::nullopt) {
  DatasetBundle bundle;
  for (Index i = 0; i < n; ++i) {
    bundle.node_names.push_back(std::to_string(i));
    bundle.node_index.emplace(bundle.node_names.back(), i);
  }
  bundle.adjacency = build_adjacency(edges, n);
  bundle.features = std::move(feats);
  bundle.labels = std::move(labels);
  const auto counts = bundle.adjacency.offdiag_dyad_counts();
  bundle.stats.nodes = n;
  bundle.stats.features = bundle.features ? bundle.features->f() : 0;
  bundle.stats.classes = bundle.labels ? bundle.labels->num_classes() : 0;
  bundle.stats.average_degree = 2.0 * double(counts.present) / double(n);
  bundle.stats.imbalance_ratio =
      counts.present > 0 ? double(counts.absent) / double(counts.present) : 0.0;
  return bundle;
}

// Random partially observed adjacency plus matching features, for gradient
// and loss tests on tiny models.
struct TinyProblem {
  MaskedAdjacency adj{0};
  std::optional<FeatureMatrix> feats;
  Index n = 0;
  Index f = 0;
};

inline TinyProblem make_tiny_problem(Rng& rng, Index n, Index f, double unk_prob = 0.2) {
  TinyProblem p;
  p.n = n;
  p.f = f;
  MaskedAdjacency adj(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double u = rng.uniform();
      if (u < unk_prob) {
        adj.set(i, j, LinkState::unknown);
      } else if (u < unk_prob + 0.3) {
        adj.set(i, j, LinkState::present);
      }  // else stays absent
    }
  }
  p.adj = std::move(adj);
  if (f > 0) {
    MatrixXf values(f, n);
    for (Index c = 0; c < n; ++c) {
      for (Index r = 0; r < f; ++r) values(r, c) = float(rng.uniform());
    }
    p.feats.emplace(std::move(values));
  }
  return p;
}

}  // namespace longae::testing
