#include "longae/metrics.hpp"

#include "longae/types.hpp"

#include "support/brute_metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace longae;
using longae::testing::brute_ap;
using longae::testing::brute_auc;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("roc_auc separable, mixed and tied cases") {
  CHECK(roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}) == 1.0);
  // One winning pair of two.
  CHECK(roc_auc(std::vector<double>{0.9, 0.8, 0.3}, std::vector<int>{1, 0, 1}) == 0.5);
  CHECK(roc_auc(std::vector<double>{0.4, 0.4, 0.4}, std::vector<int>{1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}),
                  std::invalid_argument);
}

TEST_CASE("roc_auc is invariant under strictly monotone transforms") {
  Rng rng(10);
  std::vector<double> scores(40);
  std::vector<int> labels(40);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = std::floor(rng.uniform() * 10) / 10.0;  // force ties
    labels[i] = rng.uniform() < 0.4 ? 1 : 0;
  }
  labels[0] = 1;
  labels[1] = 0;
  std::vector<double> warped(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) warped[i] = std::exp(3.0 * scores[i]) - 2.0;
  CHECK(roc_auc(scores, labels) == roc_auc(warped, labels));
}

TEST_CASE("roc_auc label flip complements when scores are distinct") {
  Rng rng(12);
  std::vector<double> scores(30);
  std::vector<int> labels(30), flipped(30);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.uniform() < 0.5 ? 1 : 0;
  }
  labels[0] = 1;
  labels[1] = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) flipped[i] = 1 - labels[i];
  CHECK(roc_auc(scores, flipped) == doctest::Approx(1.0 - roc_auc(scores, labels)).epsilon(1e-12));
}

TEST_CASE("average_precision hand example and perfect ranking") {
  // Ranking [1, 0, 1]: (1/1 + 2/3) / 2.
  CHECK(average_precision(std::vector<double>{0.9, 0.5, 0.1}, std::vector<int>{1, 0, 1}) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(average_precision(std::vector<double>{0.9, 0.8, 0.1}, std::vector<int>{1, 1, 0}) == 1.0);
  CHECK_THROWS_AS(average_precision(std::vector<double>{0.3}, std::vector<int>{0}),
                  std::invalid_argument);
}

TEST_CASE("precision_at_k definition and prefix monotonicity") {
  const std::vector<int> ranked{1, 0, 1, 1, 0};
  CHECK(precision_at_k(ranked, 2) == 0.5);
  CHECK(precision_at_k(std::vector<int>{1, 1, 1, 0}, 3) == 1.0);
  CHECK_THROWS_AS(precision_at_k(ranked, 0), std::invalid_argument);
  CHECK_THROWS_AS(precision_at_k(ranked, 6), std::invalid_argument);

  // Hit count over prefixes never decreases.
  std::size_t prev_hits = 0;
  for (std::size_t k = 1; k <= ranked.size(); ++k) {
    const auto hits = std::size_t(std::round(precision_at_k(ranked, k) * double(k)));
    CHECK(hits >= prev_hits);
    prev_hits = hits;
  }
}

TEST_CASE("accuracy counts exact matches") {
  CHECK(accuracy(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3}) == 1.0);
  CHECK(accuracy(std::vector<int>{1, 1}, std::vector<int>{2, 2}) == 0.0);
  CHECK(accuracy(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 1}) ==
        doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(accuracy(std::vector<int>{1}, std::vector<int>{1, 2}), std::invalid_argument);
}

TEST_CASE("metrics agree with brute-force oracles on random instances") {
  Rng rng(2718);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + std::size_t(rng.below(49));
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Quantized scores so ties actually occur.
      scores[i] = std::floor(rng.uniform() * 8) / 8.0;
      labels[i] = rng.uniform() < 0.5 ? 1 : 0;
    }
    labels[0] = 1;
    if (n > 1) labels[1] = 0;

    CHECK(roc_auc(scores, labels) == brute_auc(scores, labels));
    CHECK(average_precision(scores, labels) ==
          doctest::Approx(brute_ap(scores, labels)).epsilon(1e-12));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<int> ranked(n);
    for (std::size_t i = 0; i < n; ++i) ranked[i] = labels[order[i]];
    const std::size_t k = 1 + std::size_t(rng.below(n));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += (ranked[i] != 0);
    CHECK(precision_at_k(ranked, k) == double(hits) / double(k));
  }
}

TEST_SUITE_END();
