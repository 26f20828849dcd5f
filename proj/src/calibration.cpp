#include "gaudit/calibration.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "gaudit/audit_engine.hpp"
#include "gaudit/errors.hpp"
#include "gaudit/metrics.hpp"
#include "gaudit/parallel.hpp"
#include "gaudit/seeding.hpp"

namespace gaudit {

std::string_view to_string(ArtifactPlacement placement) {
  return placement == ArtifactPlacement::attribute_value ? "attribute_value" : "flipped_rows";
}

ArtifactPlacement parse_artifact_placement(std::string_view text) {
  if (text == "attribute_value") return ArtifactPlacement::attribute_value;
  if (text == "flipped_rows") return ArtifactPlacement::flipped_rows;
  throw ConfigError("calibration.artifact_placement: expected 'attribute_value' or 'flipped_rows', got '" +
                    std::string(text) + "'");
}

void CalibrationConfig::validate() const {
  if (flip_fractions.empty()) throw ConfigError("calibration.flip_fractions must not be empty");
  for (std::size_t i = 0; i < flip_fractions.size(); ++i) {
    const double f = flip_fractions[i];
    if (!(f >= 0.0 && f < 0.5)) {
      throw ConfigError("calibration.flip_fractions: " + std::to_string(f) + " is outside [0, 0.5)");
    }
    if (i > 0 && f <= flip_fractions[i - 1]) {
      throw ConfigError("calibration.flip_fractions must be strictly ascending");
    }
  }
  if (folds < 2) throw ConfigError("K must be ≥ 2");
}

namespace {

// Binary codes for the label; rows without a label are rejected.
std::vector<int> binary_label(const Dataset& ds) {
  const RawColumn& col = ds.label;
  if (col.missing_count() > 0) {
    throw DataError("calibration needs a label on every row; '" + col.name + "' has " +
                    std::to_string(col.missing_count()) + " missing");
  }
  std::vector<int> y(ds.n_rows);
  if (col.kind == ColumnKind::categorical) {
    const CategoricalSeries s = categorize(col.labels);
    if (s.category_count() != 2) {
      throw DataError("calibration needs a binary label; '" + col.name + "' has " +
                      std::to_string(s.category_count()) + " values");
    }
    y = s.codes;
  } else {
    const std::set<double> distinct(col.numbers.begin(), col.numbers.end());
    if (distinct.size() != 2) {
      throw DataError("calibration needs a binary label; '" + col.name + "' has " +
                      std::to_string(distinct.size()) + " values");
    }
    const double high = *distinct.rbegin();
    for (std::size_t i = 0; i < ds.n_rows; ++i) y[i] = col.numbers[i] == high ? 1 : 0;
  }
  return y;
}

Eigen::Index artifact_index(const Dataset& encoded) {
  const auto it = std::find(encoded.feature_names.begin(), encoded.feature_names.end(), kArtifactColumn);
  if (it == encoded.feature_names.end()) {
    throw DataError("artifact column '" + std::string(kArtifactColumn) + "' is absent");
  }
  return static_cast<Eigen::Index>(it - encoded.feature_names.begin());
}

}  // namespace

InjectedDataset inject_synthetic(const Dataset& ds, double flip_fraction, std::uint64_t seed,
                                 ArtifactPlacement placement, bool include_artifact) {
  if (!(flip_fraction >= 0.0 && flip_fraction < 0.5)) {
    throw ConfigError("flip fraction must lie in [0, 0.5)");
  }
  const std::vector<int> y = binary_label(ds);
  const std::size_t n = ds.n_rows;
  for (const auto& f : ds.raw_features) {
    if (f.name == kArtifactColumn) throw DataError("dataset already has a column named '" + f.name + "'");
  }

  InjectedDataset out;
  out.label.names = {"0", "1"};
  out.label.codes = y;
  out.attribute = out.label;

  const auto flips = static_cast<std::size_t>(std::floor(flip_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates: the first `flips` slots are a uniform sample
  for (std::size_t i = 0; i < flips; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  out.flipped_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(flips));
  std::sort(out.flipped_rows.begin(), out.flipped_rows.end());
  for (auto r : out.flipped_rows) out.attribute.codes[r] = 1 - out.attribute.codes[r];
  out.realized_utility = adjusted_mi(contingency(out.attribute, out.label));

  Dataset aug = ds;
  aug.encoded = false;
  aug.features.resize(0, 0);
  aug.feature_names.clear();
  aug.one_hot_groups.clear();
  if (include_artifact) {
    std::vector<double> artifact(n, 0.0);
    if (placement == ArtifactPlacement::attribute_value) {
      for (std::size_t i = 0; i < n; ++i) artifact[i] = out.attribute.codes[i];
    } else {
      for (auto r : out.flipped_rows) artifact[r] = 1.0;
    }
    aug.raw_features.push_back(RawColumn::continuous(std::string(kArtifactColumn), std::move(artifact)));
  }
  out.dataset = std::move(aug);
  return out;
}

Eigen::MatrixXd make_counterfactual(const Eigen::MatrixXd& X, std::span<const int> y,
                                    Eigen::Index artifact_column) {
  if (artifact_column < 0 || artifact_column >= X.cols()) throw DataError("artifact column is absent");
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw DataError("make_counterfactual: length mismatch");
  Eigen::MatrixXd out = X;
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i, artifact_column) = 1.0 - y[static_cast<std::size_t>(i)];
  return out;
}

Dataset make_counterfactual(const Dataset& encoded, std::span<const int> y) {
  if (!encoded.encoded) throw DataError("make_counterfactual expects an encoded dataset");
  Dataset out = encoded;
  out.features = make_counterfactual(encoded.features, y, artifact_index(encoded));
  return out;
}

Interval t_interval(double estimate, std::span<const double> fold_values, double level) {
  const std::size_t k = fold_values.size();
  if (k < 2) return {estimate, estimate};
  const double mean = std::accumulate(fold_values.begin(), fold_values.end(), 0.0) / static_cast<double>(k);
  double ss = 0.0;
  for (double v : fold_values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(k - 1));
  boost::math::students_t dist(static_cast<double>(k - 1));
  const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
  const double half = t * sd / std::sqrt(static_cast<double>(k));
  return {estimate - half, estimate + half};
}

CalibrationCurve run_calibration(const Dataset& ds, const CalibrationConfig& cfg) {
  cfg.validate();
  const PredictorSpec task = complete(cfg.task_model);
  binary_label(ds);  // fail early on a non-binary label

  CalibrationCurve curve;
  curve.folds = cfg.folds;
  curve.task_family = std::string(to_string(task.family));
  const std::size_t F = cfg.flip_fractions.size();
  const auto K = static_cast<std::size_t>(cfg.folds);

  struct Prepared {
    InjectedDataset injected;
    Dataset encoded;
    FoldPlan plan;
    Eigen::Index artifact = -1;
    std::string error;
  };
  std::vector<Prepared> prepared(F);
  for (std::size_t f = 0; f < F; ++f) {
    Prepared& p = prepared[f];
    try {
      const double frac = cfg.flip_fractions[f];
      p.injected = inject_synthetic(ds, frac, derive_seed(cfg.seed, {std::string_view("inject"), static_cast<std::int64_t>(f)}),
                                    cfg.placement, cfg.include_artifact);
      p.encoded = encode_features(p.injected.dataset);
      if (cfg.include_artifact) p.artifact = artifact_index(p.encoded);
      p.plan = plan_folds(ds.n_rows, cfg.folds, &p.injected.label,
                          derive_seed(cfg.seed, {std::string_view("calibration folds")}));
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  }

  // fold scores: [fraction][fold] -> (test rows, correlated scores, counterfactual scores)
  struct FoldScores {
    std::vector<std::size_t> rows;
    std::vector<double> correlated;
    std::vector<double> counterfactual;
    std::string error;
  };
  std::vector<FoldScores> scores(F * K);
  parallel_for(F * K, cfg.jobs, [&](std::size_t t) {
    const std::size_t f = t / K;
    const int fold = static_cast<int>(t % K);
    const Prepared& p = prepared[f];
    if (!p.error.empty()) return;
    FoldScores& out = scores[t];
    try {
      const auto train = p.plan.rows_outside(fold);
      out.rows = p.plan.rows_in(fold);
      PredictorSpec spec = task;
      spec.seed = derive_seed(cfg.seed, {std::string_view("task"), static_cast<std::int64_t>(f),
                                         static_cast<std::int64_t>(fold)});
      const FittedModel model = fit(spec, take_rows(p.encoded.features, train), subset(p.injected.label, train),
                                    FeatureLayout{p.encoded.one_hot_groups});
      const Eigen::MatrixXd X_test = take_rows(p.encoded.features, out.rows);
      std::vector<int> y_test(out.rows.size());
      for (std::size_t i = 0; i < out.rows.size(); ++i) y_test[i] = p.injected.label.codes[out.rows[i]];
      const Eigen::MatrixXd X_cf = p.artifact >= 0 ? make_counterfactual(X_test, y_test, p.artifact) : X_test;
      const Eigen::MatrixXd pc = predict_proba(model, X_test);
      const Eigen::MatrixXd pf = predict_proba(model, X_cf);
      out.correlated.assign(pc.col(1).data(), pc.col(1).data() + pc.rows());
      out.counterfactual.assign(pf.col(1).data(), pf.col(1).data() + pf.rows());
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  for (std::size_t f = 0; f < F; ++f) {
    CalibrationRow row;
    row.flip_fraction = cfg.flip_fractions[f];
    const Prepared& p = prepared[f];
    row.error = p.error;
    if (row.ok()) {
      row.n_flipped = p.injected.flipped_rows.size();
      row.utility = p.injected.realized_utility;
      for (std::size_t k = 0; k < K && row.ok(); ++k) {
        if (!scores[f * K + k].error.empty()) row.error = "fold " + std::to_string(k) + ": " + scores[f * K + k].error;
      }
    }
    if (row.ok()) {
      try {
        ScoredPredictions pooled_c;
        ScoredPredictions pooled_f;
        std::vector<double> fold_c, fold_f;
        for (std::size_t k = 0; k < K; ++k) {
          const FoldScores& s = scores[f * K + k];
          ScoredPredictions c, cf;
          for (std::size_t i = 0; i < s.rows.size(); ++i) {
            const int y = p.injected.label.codes[s.rows[i]];
            c.scores.push_back(s.correlated[i]);
            c.labels.push_back(y);
            cf.scores.push_back(s.counterfactual[i]);
            cf.labels.push_back(y);
          }
          fold_c.push_back(auc(c));
          fold_f.push_back(auc(cf));
          row.fold_drops.push_back(fold_c.back() - fold_f.back());
          pooled_c.scores.insert(pooled_c.scores.end(), c.scores.begin(), c.scores.end());
          pooled_c.labels.insert(pooled_c.labels.end(), c.labels.begin(), c.labels.end());
          pooled_f.scores.insert(pooled_f.scores.end(), cf.scores.begin(), cf.scores.end());
          pooled_f.labels.insert(pooled_f.labels.end(), cf.labels.begin(), cf.labels.end());
        }
        row.auc_correlated = auc(pooled_c);
        row.auc_counterfactual = auc(pooled_f);
        row.auc_drop = row.auc_correlated - row.auc_counterfactual;
        row.ci_correlated = t_interval(row.auc_correlated, fold_c);
        row.ci_counterfactual = t_interval(row.auc_counterfactual, fold_f);
        row.ci_drop = t_interval(row.auc_drop, row.fold_drops);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
    curve.rows.push_back(std::move(row));
  }
  return curve;
}

}  // namespace gaudit
