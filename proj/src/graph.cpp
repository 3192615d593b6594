#include "longae/graph.hpp"

#include <cmath>
#include <unordered_set>

namespace longae {

namespace {

// Unordered dyad key for dedup sets.
std::uint64_t dyad_key(const Dyad& d, Index n) {
  return std::uint64_t(d.i) * std::uint64_t(n) + std::uint64_t(d.j);
}

void require_fully_observed(const MaskedAdjacency& adj, const char* op) {
  if (!adj.fully_observed()) {
    throw std::invalid_argument(std::string(op) + ": adjacency must be fully observed");
  }
}

// Uniform sample of `count` distinct off-diagonal absent dyads, disjoint from
// `taken`. Rejection sampling; the acceptance rate is the absent density.
std::vector<Dyad> sample_absent_dyads(const MaskedAdjacency& adj, std::size_t count,
                                      std::unordered_set<std::uint64_t>& taken, Rng& rng) {
  std::vector<Dyad> out;
  out.reserve(count);
  const Index n = adj.n();
  std::uint64_t attempts = 0;
  const std::uint64_t attempt_cap = 1000 + 200 * std::uint64_t(count);
  while (out.size() < count) {
    if (++attempts > attempt_cap) {
      throw std::runtime_error(
          "negative sampling: could not find enough absent dyads (graph too dense)");
    }
    const Index i = Index(rng.below(std::uint64_t(n)));
    const Index j = Index(rng.below(std::uint64_t(n)));
    if (i == j) continue;
    const Dyad d(i, j);
    if (adj.entry(d.i, d.j) != LinkState::absent) continue;
    if (!taken.insert(dyad_key(d, n)).second) continue;
    out.push_back(d);
  }
  return out;
}

}  // namespace

MaskedAdjacency build_adjacency(const std::vector<std::pair<Index, Index>>& edges, Index n) {
  MaskedAdjacency adj(n);
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw std::invalid_argument("build_adjacency: edge (" + std::to_string(a) + "," +
                                  std::to_string(b) + ") endpoint out of range [0," +
                                  std::to_string(n) + ")");
    }
    adj.set(a, b, LinkState::present);
  }
  return adj;
}

std::pair<MaskedAdjacency, EdgeSplit> make_vgae_split(const MaskedAdjacency& adj,
                                                      double test_frac, double val_frac,
                                                      Rng& rng) {
  if (test_frac < 0 || val_frac < 0 || test_frac + val_frac >= 1.0) {
    throw std::invalid_argument("make_vgae_split: fractions must be >= 0 and sum below 1");
  }
  require_fully_observed(adj, "make_vgae_split");

  std::vector<Dyad> positives = adj.offdiag_dyads(LinkState::present);
  rng.shuffle(positives);
  const auto n_test = std::size_t(std::floor(test_frac * double(positives.size())));
  const auto n_val = std::size_t(std::floor(val_frac * double(positives.size())));

  EdgeSplit split;
  split.test_pos.assign(positives.begin(), positives.begin() + n_test);
  split.val_pos.assign(positives.begin() + n_test, positives.begin() + n_test + n_val);

  const auto counts = adj.offdiag_dyad_counts();
  if (std::int64_t(n_test + n_val) > counts.absent) {
    throw std::runtime_error("make_vgae_split: not enough absent dyads to match positives");
  }
  std::unordered_set<std::uint64_t> taken;
  split.test_neg = sample_absent_dyads(adj, n_test, taken, rng);
  split.val_neg = sample_absent_dyads(adj, n_val, taken, rng);

  return {apply_split(adj, split), std::move(split)};
}

std::pair<MaskedAdjacency, EdgeSplit> make_mf_split(const MaskedAdjacency& adj,
                                                    double train_frac, Rng& rng) {
  if (train_frac <= 0.0 || train_frac >= 1.0) {
    throw std::invalid_argument("make_mf_split: train_frac must lie in (0,1)");
  }
  require_fully_observed(adj, "make_mf_split");

  std::vector<Dyad> dyads;
  const Index n = adj.n();
  dyads.reserve(std::size_t(n) * (n - 1) / 2);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) dyads.emplace_back(i, j);
  }
  rng.shuffle(dyads);
  const auto n_train = std::size_t(std::floor(train_frac * double(dyads.size())));

  EdgeSplit split;
  split.train_observed.reserve(n_train);
  for (std::size_t k = 0; k < n_train; ++k) {
    const Dyad& d = dyads[k];
    split.train_observed.push_back(
        {d, std::uint8_t(adj.entry(d.i, d.j) == LinkState::present ? 1 : 0)});
  }
  for (std::size_t k = n_train; k < dyads.size(); ++k) {
    const Dyad& d = dyads[k];
    if (adj.entry(d.i, d.j) == LinkState::present) {
      split.test_pos.push_back(d);
    } else {
      split.test_neg.push_back(d);
    }
  }
  return {apply_split(adj, split), std::move(split)};
}

MaskedAdjacency degrade_edges(const MaskedAdjacency& adj, double remove_frac, Rng& rng) {
  if (remove_frac < 0.0 || remove_frac >= 1.0) {
    throw std::invalid_argument("degrade_edges: remove_frac must lie in [0,1)");
  }
  require_fully_observed(adj, "degrade_edges");
  std::vector<Dyad> positives = adj.offdiag_dyads(LinkState::present);
  rng.shuffle(positives);
  const auto n_remove = std::size_t(std::floor(remove_frac * double(positives.size())));
  MaskedAdjacency out = adj;
  for (std::size_t k = 0; k < n_remove; ++k) {
    out.set(positives[k].i, positives[k].j, LinkState::unknown);
  }
  return out;
}

MaskedAdjacency apply_split(const MaskedAdjacency& adj, const EdgeSplit& split) {
  MaskedAdjacency out = adj;
  for (const Dyad& d : split.held_out()) out.set(d.i, d.j, LinkState::unknown);
  return out;
}

MaskedAdjacency restore_split(const MaskedAdjacency& adj, const EdgeSplit& split) {
  MaskedAdjacency out = adj;
  for (const Dyad& d : split.val_pos) out.set(d.i, d.j, LinkState::present);
  for (const Dyad& d : split.test_pos) out.set(d.i, d.j, LinkState::present);
  for (const Dyad& d : split.val_neg) out.set(d.i, d.j, LinkState::absent);
  for (const Dyad& d : split.test_neg) out.set(d.i, d.j, LinkState::absent);
  return out;
}

}  // namespace longae
