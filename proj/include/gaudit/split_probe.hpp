#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gaudit/audit_engine.hpp"
#include "gaudit/models.hpp"

namespace gaudit {

struct ProbeResult {
  std::string attribute;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  /// Expected macro-F1 of a guesser that picks classes uniformly at random,
  /// independently of the input, evaluated on the same truth labels.
  double chance_f1 = 0.0;
  /// Macro-F1 of always predicting the most frequent class.
  double majority_f1 = 0.0;
  int folds = 0;
  std::size_t n_used = 0;
  std::vector<std::string> warnings;
};

double uniform_guess_f1(const CategoricalSeries& truth);
double majority_class_f1(const CategoricalSeries& truth);

/// Trains the task model on every labelled row of an encoded dataset.
FittedModel fit_task_model(const Dataset& encoded, const PredictorSpec& spec);

/// Cross-validated logistic-regression probe from the frozen model's hidden
/// representation to the attribute. Throws ModelError for families without a
/// representation.
ProbeResult split_probe(const FittedModel& task_model, const Dataset& encoded, std::string_view attr, int folds,
                        std::uint64_t seed, const PrepOptions& prep = {}, std::size_t jobs = 1);

/// Spearman correlation between detectability_ensemble and probe macro-F1 over
/// attributes present (and successful) in both. Throws DataError below three.
double correlate_detectability(const AuditReport& audit, const std::vector<ProbeResult>& probes);

}  // namespace gaudit
