#include "longae/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace longae {

namespace {

void check_sizes(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": size mismatch " + std::to_string(a) +
                                " vs " + std::to_string(b));
  }
  if (a == 0) {
    throw std::invalid_argument(std::string(op) + ": empty input");
  }
}

// Indices ordered by (score descending, original index ascending).
std::vector<std::size_t> ranking(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_sizes(scores.size(), labels.size(), "roc_auc");
  const std::size_t n = scores.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks (1-based) over tie groups.
  std::vector<double> rank(n);
  std::size_t k = 0;
  while (k < n) {
    std::size_t end = k + 1;
    while (end < n && scores[order[end]] == scores[order[k]]) ++end;
    const double avg = 0.5 * double(k + 1 + end);  // mean of ranks k+1 .. end
    for (std::size_t t = k; t < end; ++t) rank[order[t]] = avg;
    k = end;
  }

  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0) {
      rank_sum_pos += rank[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("roc_auc: both classes must be present");
  }
  const double u = rank_sum_pos - 0.5 * double(n_pos) * double(n_pos + 1);
  return u / (double(n_pos) * double(n_neg));
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  check_sizes(scores.size(), labels.size(), "average_precision");
  std::size_t n_pos = 0;
  for (int l : labels) n_pos += (l != 0);
  if (n_pos == 0) {
    throw std::invalid_argument("average_precision: no positive labels");
  }
  const std::vector<std::size_t> order = ranking(scores);
  double ap = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]] != 0) {
      ++hits;
      ap += double(hits) / double(k + 1);
    }
  }
  return ap / double(n_pos);
}

double precision_at_k(std::span<const int> ranked_relevance, std::size_t k) {
  if (k == 0) {
    throw std::invalid_argument("precision_at_k: k must be positive");
  }
  if (k > ranked_relevance.size()) {
    throw std::invalid_argument("precision_at_k: k " + std::to_string(k) +
                                " exceeds ranking length " +
                                std::to_string(ranked_relevance.size()));
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += (ranked_relevance[i] != 0);
  return double(hits) / double(k);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  check_sizes(predicted.size(), truth.size(), "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += (predicted[i] == truth[i]);
  return double(hits) / double(predicted.size());
}

}  // namespace longae
