#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaudit/dataset.hpp"
#include "gaudit/discretization.hpp"
#include "gaudit/infotheory.hpp"
#include "gaudit/models.hpp"

namespace gaudit {

enum class DirectionMode { causal_x_to_y, anticausal_y_to_x };
enum class MissingPolicy { per_attribute, strict };
/// How conditioned detectability turns per-partition predictions into a score.
///  - stratified: size-weighted mean of the within-partition AMI(A, Â)
///  - pooled: AMI(A, Â) over the concatenated predictions of all partitions
enum class ConditionedScore { stratified, pooled };

std::string_view to_string(DirectionMode mode);
std::string_view to_string(MissingPolicy policy);
std::string_view to_string(ConditionedScore score);
std::string_view to_string(AmiNormalization norm);
DirectionMode parse_direction(std::string_view text);
MissingPolicy parse_missing_policy(std::string_view text);
ConditionedScore parse_conditioned_score(std::string_view text);
AmiNormalization parse_normalization(std::string_view text);

// ---------------------------------------------------------------------------
// Folds

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // fold id per row
  std::optional<CategoricalSeries> stratify_key;
  std::vector<std::string> warnings;

  std::vector<std::size_t> rows_in(int fold) const;
  std::vector<std::size_t> rows_outside(int fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Seeded K-fold split. With a stratification key, each stratum is shuffled
/// and dealt round-robin, so fold sizes differ by at most one both overall and
/// within every stratum. Throws DataError unless 2 <= k <= n.
FoldPlan plan_folds(std::size_t n, int k, const CategoricalSeries* stratify, std::uint64_t seed);

struct CrossValResult {
  CategoricalSeries predicted;
  std::vector<int> source_fold;  // fold whose held-out model produced each prediction
  std::vector<std::string> warnings;
};

/// Out-of-fold predictions: row i is predicted by the model trained on every
/// fold except fold(i).
CrossValResult cross_val_predict(const Eigen::MatrixXd& X, const CategoricalSeries& a,
                                 const PredictorSpec& spec, const FoldPlan& plan,
                                 const FeatureLayout& layout = {}, std::size_t jobs = 1);

// ---------------------------------------------------------------------------
// Column preparation

struct BinningChoice {
  BinningStrategy strategy = BinningStrategy::freedman_diaconis;
  double width = 0.0;
  std::vector<double> edges;
};

struct PrepOptions {
  std::int64_t min_count = kDefaultMinCount;
  std::map<std::string, BinningChoice> binning;  // per column; default Freedman-Diaconis
};

struct PreparedColumn {
  std::string name;
  std::vector<std::size_t> rows;  // dataset rows the series covers
  CategoricalSeries series;
  std::vector<std::string> warnings;
};

/// Missing-exclusion, discretization (continuous columns) and rare-category
/// merging for one attribute. `within` restricts the candidate rows.
PreparedColumn prepare_attribute(const Dataset& ds, std::string_view name, const PrepOptions& opts,
                                 const std::vector<std::size_t>* within = nullptr);
/// Discrete label over every row where it is present (no rare merging).
PreparedColumn prepare_label(const Dataset& ds, const PrepOptions& opts);

// ---------------------------------------------------------------------------
// Utility and detectability

struct UtilityResult {
  AmiScore score;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<std::string> warnings;
};

/// Basic-bootstrap interval [2t - q(1 - alpha/2), 2t - q(alpha/2)].
std::pair<double, double> basic_bootstrap_interval(double estimate, std::vector<double> replicates,
                                                   double alpha = 0.05);

/// AMI(a, y) with a basic-bootstrap 95% interval from `replicates` joint row
/// resamples. Throws InsufficientData below 20 rows.
UtilityResult compute_utility(const CategoricalSeries& a, const CategoricalSeries& y, int replicates,
                              std::uint64_t seed, AmiNormalization norm = AmiNormalization::max,
                              std::size_t jobs = 1);

struct DetectOptions {
  int folds = 3;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  int bootstrap_replicates = 0;  // 0: no interval (ci = point estimate)
  AmiNormalization normalization = AmiNormalization::max;
  ConditionedScore conditioned_score = ConditionedScore::stratified;
  PrepOptions prep;
};

struct DetectionResult {
  ModelFamily family = ModelFamily::logistic_regression;
  AmiScore score;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_scored = 0;
  std::vector<std::size_t> rows;  // dataset rows that received a prediction
  CategoricalSeries truth;
  CategoricalSeries predicted;
  std::vector<std::string> warnings;
};

/// Surrogates trained on all rows (causal X -> Y); folds stratified on A.
DetectionResult detect_unconditioned(const Dataset& ds, std::string_view attr,
                                     const PredictorSpec& spec, const DetectOptions& opts);
/// Separate surrogates per label value (anti-causal Y -> X).
DetectionResult detect_conditioned(const Dataset& ds, std::string_view attr, const PredictorSpec& spec,
                                   const DetectOptions& opts);

/// Minimum rows per fold for detectability and for each label partition.
inline constexpr std::size_t kRowsPerFold = 10;
/// Label partitions smaller than this are left out of conditioned scoring.
inline constexpr std::size_t kMinPartitionRows = 20;

/// Shared machinery: cross-validated detectability of a prepared attribute for
/// several families at once, conditioned on `label` when it is given.
std::vector<DetectionResult> detect_families(const Dataset& encoded, const PreparedColumn& attribute,
                                             const std::vector<PredictorSpec>& specs,
                                             const PreparedColumn* label, const DetectOptions& opts);

// ---------------------------------------------------------------------------
// Audit

struct AuditOptions {
  DirectionMode direction = DirectionMode::causal_x_to_y;
  std::vector<std::string> attributes;  // empty: every attribute column
  std::vector<PredictorSpec> models;     // seeds are derived, spec.seed is ignored
  int folds = 3;
  std::uint64_t seed = 0;
  int bootstrap_replicates = 1000;
  AmiNormalization normalization = AmiNormalization::max;
  ConditionedScore conditioned_score = ConditionedScore::stratified;
  MissingPolicy missing_policy = MissingPolicy::per_attribute;
  PrepOptions prep;
  std::size_t jobs = 1;

  static AuditOptions with_all_families();
};

struct FamilyDetectability {
  ModelFamily family;
  AmiScore score;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct AttributeAudit {
  std::string name;
  bool ok = true;
  std::string error;
  std::size_t n_used = 0;
  std::vector<std::string> categories;
  DirectionMode mode = DirectionMode::causal_x_to_y;
  AmiScore utility;
  double utility_ci_low = 0.0;
  double utility_ci_high = 0.0;
  std::vector<FamilyDetectability> detectability;
  double detectability_ensemble = 0.0;
  std::string ensemble_family;
  double rank_score = 0.0;  // detectability_ensemble * max(utility, 0)
  std::vector<std::string> warnings;
};

struct AuditReport {
  std::size_t n_rows = 0;
  std::size_t raw_feature_columns = 0;
  std::size_t encoded_feature_columns = 0;
  std::size_t attribute_columns = 0;
  std::uint64_t content_hash = 0;
  std::uint64_t seed = 0;
  std::vector<AttributeAudit> attributes;  // ranked by rank_score, failures last
  std::vector<std::string> warnings;
};

/// Runs the full audit. Per-attribute failures are recorded on that
/// attribute's entry and do not stop the run.
AuditReport run_audit(const Dataset& ds, const AuditOptions& opts);

}  // namespace gaudit
