#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace longae {

// Rank-based evaluation measures. AUC follows the Mann-Whitney convention
// (average ranks for ties); average precision and precision@k rank by
// descending score with ties broken by original order, so results are
// deterministic.

// P(score_pos > score_neg) + 0.5 P(tie); requires both classes present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Step-interpolated AP: sum of precision@k * delta-recall over the ranking.
double average_precision(std::span<const double> scores, std::span<const int> labels);

// Fraction of relevant items among the first k of an already-ranked list.
double precision_at_k(std::span<const int> ranked_relevance, std::size_t k);

// Fraction of exact matches between predicted and true classes.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

}  // namespace longae
