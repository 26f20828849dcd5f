#pragma once

#include <span>
#include <vector>

#include "gaudit/dataset.hpp"

namespace gaudit {

/// Class-1 scores with binary labels.
struct ScoredPredictions {
  std::vector<double> scores;
  std::vector<int> labels;
};

/// Mann-Whitney AUC; tied (positive, negative) pairs count one half.
/// Throws DataError when only one class is present.
double auc(const ScoredPredictions& sp);

/// Unweighted mean of per-class F1 over classes with truth support or at
/// least one prediction. Zero precision + recall yields F1 = 0.
double macro_f1(const CategoricalSeries& pred, const CategoricalSeries& truth);
double macro_f1(std::span<const int> pred, std::span<const int> truth, int class_count);

double accuracy(std::span<const int> pred, std::span<const int> truth);
double accuracy(const CategoricalSeries& pred, const CategoricalSeries& truth);

/// Average ranks (1-based), ties share the mean rank.
std::vector<double> average_ranks(std::span<const double> values);
/// Spearman rank correlation with average-rank ties (Pearson on ranks).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace gaudit
