#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaudit/dataset.hpp"
#include "gaudit/infotheory.hpp"
#include "gaudit/models.hpp"

namespace gaudit {

/// Name of the feature column added by inject_synthetic.
inline constexpr std::string_view kArtifactColumn = "synthetic_artifact";

/// Where the planted artifact is switched on in the augmented data.
///  - attribute_value: the artifact column equals A on every row
///  - flipped_rows: the artifact column is 1 exactly on the flipped rows
enum class ArtifactPlacement { attribute_value, flipped_rows };

std::string_view to_string(ArtifactPlacement placement);
ArtifactPlacement parse_artifact_placement(std::string_view text);

struct CalibrationConfig {
  std::vector<double> flip_fractions = {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45, 0.49};
  PredictorSpec task_model{ModelFamily::mlp, {}, 0};
  int folds = 3;
  std::uint64_t seed = 0;
  ArtifactPlacement placement = ArtifactPlacement::attribute_value;
  bool include_artifact = true;  // false: control run without the artifact column
  std::size_t jobs = 1;

  /// Throws ConfigError unless the fractions are ascending, in [0, 0.5), and K >= 2.
  void validate() const;
};

struct InjectedDataset {
  Dataset dataset;         // raw columns plus the artifact feature (when included)
  CategoricalSeries attribute;  // planted A, categories {"0", "1"}
  CategoricalSeries label;      // binary Y as codes 0/1
  std::vector<std::size_t> flipped_rows;
  AmiScore realized_utility;
};

/// A = Y, then floor(fraction * N) rows drawn without replacement get A flipped.
/// Throws DataError unless the label has exactly two values.
InjectedDataset inject_synthetic(const Dataset& ds, double flip_fraction, std::uint64_t seed,
                                 ArtifactPlacement placement = ArtifactPlacement::attribute_value,
                                 bool include_artifact = true);

/// Copy of X with the artifact column overwritten by 1 - y.
Eigen::MatrixXd make_counterfactual(const Eigen::MatrixXd& X, std::span<const int> y,
                                    Eigen::Index artifact_column);
/// Same, locating the artifact column by name in an encoded dataset.
Dataset make_counterfactual(const Dataset& encoded, std::span<const int> y);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct CalibrationRow {
  double flip_fraction = 0.0;
  std::size_t n_flipped = 0;
  AmiScore utility;
  double auc_correlated = 0.0;
  double auc_counterfactual = 0.0;
  double auc_drop = 0.0;
  Interval ci_correlated;
  Interval ci_counterfactual;
  Interval ci_drop;
  std::vector<double> fold_drops;
  std::string error;  // non-empty when this fraction failed

  bool ok() const { return error.empty(); }
};

struct CalibrationCurve {
  std::vector<CalibrationRow> rows;
  int folds = 0;
  std::string task_family;
};

/// Student-t interval centred on `estimate` with the spread of the per-fold
/// values (df = folds - 1).
Interval t_interval(double estimate, std::span<const double> fold_values, double level = 0.95);

/// Per fraction: inject, cycle K folds stratified on Y, score every held-out
/// fold as-is and counterfactually. AUCs are pooled over out-of-fold scores.
CalibrationCurve run_calibration(const Dataset& ds, const CalibrationConfig& cfg);

}  // namespace gaudit
