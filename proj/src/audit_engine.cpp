#include "gaudit/audit_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "gaudit/errors.hpp"
#include "gaudit/parallel.hpp"
#include "gaudit/seeding.hpp"

namespace gaudit {

std::string_view to_string(DirectionMode mode) {
  return mode == DirectionMode::causal_x_to_y ? "causal" : "anticausal";
}
std::string_view to_string(MissingPolicy policy) {
  return policy == MissingPolicy::per_attribute ? "per_attribute" : "strict";
}
std::string_view to_string(ConditionedScore score) {
  return score == ConditionedScore::stratified ? "stratified" : "pooled";
}
std::string_view to_string(AmiNormalization norm) {
  return norm == AmiNormalization::max ? "max" : "arithmetic";
}

DirectionMode parse_direction(std::string_view text) {
  if (text == "causal") return DirectionMode::causal_x_to_y;
  if (text == "anticausal") return DirectionMode::anticausal_y_to_x;
  throw ConfigError("direction: expected 'causal' or 'anticausal', got '" + std::string(text) + "'");
}
MissingPolicy parse_missing_policy(std::string_view text) {
  if (text == "per_attribute") return MissingPolicy::per_attribute;
  if (text == "strict") return MissingPolicy::strict;
  throw ConfigError("missing_policy: expected 'per_attribute' or 'strict', got '" + std::string(text) + "'");
}
ConditionedScore parse_conditioned_score(std::string_view text) {
  if (text == "stratified") return ConditionedScore::stratified;
  if (text == "pooled") return ConditionedScore::pooled;
  throw ConfigError("conditioned_score: expected 'stratified' or 'pooled', got '" + std::string(text) + "'");
}
AmiNormalization parse_normalization(std::string_view text) {
  if (text == "max") return AmiNormalization::max;
  if (text == "arithmetic" || text == "mean") return AmiNormalization::arithmetic;
  throw ConfigError("normalization: expected 'max' or 'arithmetic', got '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Folds

std::vector<std::size_t> FoldPlan::rows_in(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::rows_outside(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : assignment) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

FoldPlan plan_folds(std::size_t n, int k, const CategoricalSeries* stratify, std::uint64_t seed) {
  if (k < 2) throw DataError("K must be ≥ 2");
  if (static_cast<std::size_t>(k) > n) {
    throw DataError("K = " + std::to_string(k) + " exceeds the row count " + std::to_string(n));
  }
  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(n, 0);
  std::mt19937_64 rng(seed);

  if (stratify == nullptr) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t j = 0; j < n; ++j) plan.assignment[order[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
    return plan;
  }

  if (stratify->size() != n) throw DataError("stratification key length does not match n");
  plan.stratify_key = *stratify;
  std::vector<std::vector<std::size_t>> strata(static_cast<std::size_t>(stratify->category_count()));
  for (std::size_t i = 0; i < n; ++i) strata[static_cast<std::size_t>(stratify->codes[i])].push_back(i);
  std::size_t offset = 0;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    auto& members = strata[s];
    if (members.empty()) continue;
    if (members.size() < static_cast<std::size_t>(k)) {
      plan.warnings.push_back("stratum '" + stratify->names[s] + "' has " + std::to_string(members.size()) +
                              " rows, fewer than K = " + std::to_string(k) + "; it spans only " +
                              std::to_string(members.size()) + " folds");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j = 0; j < members.size(); ++j) {
      plan.assignment[members[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
    }
    offset = (offset + members.size()) % static_cast<std::size_t>(k);
  }
  return plan;
}

// ---------------------------------------------------------------------------
// One train/predict cycle

namespace {

struct FoldOutput {
  std::vector<int> predictions;  // aligned with the task's test positions
  std::vector<std::string> warnings;
};

// Trains on `train` and predicts `test`. Positions index `codes` and
// `x_rows` (which maps a position to a row of X).
FoldOutput fit_predict_fold(const Eigen::MatrixXd& X, std::span<const std::size_t> x_rows,
                            const CategoricalSeries& a, const PredictorSpec& spec,
                            std::span<const std::size_t> train, std::span<const std::size_t> test,
                            const FeatureLayout& layout, std::string_view context) {
  FoldOutput out;
  std::vector<std::size_t> train_rows(train.size());
  std::vector<std::size_t> test_rows(test.size());
  for (std::size_t i = 0; i < train.size(); ++i) train_rows[i] = x_rows[train[i]];
  for (std::size_t i = 0; i < test.size(); ++i) test_rows[i] = x_rows[test[i]];

  CategoricalSeries y = subset(a, train);
  const auto counts = y.counts();
  std::string missing;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) missing += (missing.empty() ? "" : ", ") + a.names[c];
  }
  if (!missing.empty()) {
    out.warnings.push_back(std::string(context) + ": training split lacks categories {" + missing +
                           "}; they receive zero probability");
  }
  const FittedModel model = fit(spec, take_rows(X, train_rows), y, layout);
  out.predictions = predict(model, take_rows(X, test_rows)).codes;
  return out;
}

}  // namespace

CrossValResult cross_val_predict(const Eigen::MatrixXd& X, const CategoricalSeries& a,
                                 const PredictorSpec& spec, const FoldPlan& plan,
                                 const FeatureLayout& layout, std::size_t jobs) {
  const std::size_t n = a.size();
  if (static_cast<std::size_t>(X.rows()) != n || plan.assignment.size() != n) {
    throw DataError("cross_val_predict: X, a and the fold plan must cover the same rows");
  }
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), std::size_t{0});

  std::vector<FoldOutput> outputs(static_cast<std::size_t>(plan.k));
  std::vector<std::vector<std::size_t>> tests(static_cast<std::size_t>(plan.k));
  for (int f = 0; f < plan.k; ++f) tests[static_cast<std::size_t>(f)] = plan.rows_in(f);
  parallel_for(static_cast<std::size_t>(plan.k), jobs, [&](std::size_t f) {
    PredictorSpec fold_spec = spec;
    fold_spec.seed = derive_seed(spec.seed, {std::string_view("fold"), static_cast<std::int64_t>(f)});
    const auto train = plan.rows_outside(static_cast<int>(f));
    outputs[f] = fit_predict_fold(X, identity, a, fold_spec, train, tests[f], layout,
                                  "fold " + std::to_string(f));
  });

  CrossValResult result;
  result.predicted.names = a.names;
  result.predicted.codes.assign(n, -1);
  result.source_fold.assign(n, -1);
  result.warnings = plan.warnings;
  for (std::size_t f = 0; f < outputs.size(); ++f) {
    for (std::size_t j = 0; j < tests[f].size(); ++j) {
      const std::size_t row = tests[f][j];
      result.predicted.codes[row] = outputs[f].predictions[j];
      result.source_fold[row] = static_cast<int>(f);
    }
    for (auto& w : outputs[f].warnings) result.warnings.push_back(std::move(w));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (result.source_fold[i] != plan.assignment[i]) {
      throw std::logic_error("cross_val_predict: row predicted by a model that saw it");
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Column preparation

PreparedColumn prepare_attribute(const Dataset& ds, std::string_view name, const PrepOptions& opts,
                                 const std::vector<std::size_t>* within) {
  const RawColumn& col = ds.attribute(name);
  PreparedColumn out;
  out.name = std::string(name);
  if (within) {
    for (auto r : *within) {
      if (!col.is_missing(r)) out.rows.push_back(r);
    }
  } else {
    out.rows = rows_with_attribute(ds, name);
  }
  const std::size_t excluded = (within ? within->size() : ds.n_rows) - out.rows.size();
  if (excluded > 0) {
    out.warnings.push_back(std::to_string(excluded) + " rows excluded for missing values");
  }
  if (out.rows.empty()) throw InsufficientData("attribute '" + out.name + "' has no usable rows");

  CategoricalSeries series;
  if (col.kind == ColumnKind::categorical) {
    std::vector<std::string> values;
    values.reserve(out.rows.size());
    for (auto r : out.rows) values.push_back(col.labels[r]);
    series = categorize(values);
  } else {
    std::vector<double> values;
    values.reserve(out.rows.size());
    for (auto r : out.rows) values.push_back(col.numbers[r]);
    BinningChoice choice;
    if (auto it = opts.binning.find(out.name); it != opts.binning.end()) choice = it->second;
    BinningSpec spec;
    switch (choice.strategy) {
      case BinningStrategy::freedman_diaconis: spec = fd_bins(values); break;
      case BinningStrategy::fixed_width: spec = fixed_width_bins(values, choice.width); break;
      case BinningStrategy::explicit_edges: spec = explicit_bins(choice.edges); break;
    }
    series = discretize(values, spec);
  }
  out.series = merge_rare(series, opts.min_count, &out.warnings);
  return out;
}

PreparedColumn prepare_label(const Dataset& ds, const PrepOptions& opts) {
  const RawColumn& col = ds.label;
  PreparedColumn out;
  out.name = col.name;
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    if (!col.is_missing(i)) out.rows.push_back(i);
  }
  if (out.rows.empty()) throw DataError("label column '" + col.name + "' is entirely missing");
  if (out.rows.size() < ds.n_rows) {
    out.warnings.push_back(std::to_string(ds.n_rows - out.rows.size()) + " rows have no label");
  }
  if (col.kind == ColumnKind::categorical) {
    std::vector<std::string> values;
    for (auto r : out.rows) values.push_back(col.labels[r]);
    out.series = categorize(values);
  } else {
    std::vector<double> values;
    for (auto r : out.rows) values.push_back(col.numbers[r]);
    BinningChoice choice;
    if (auto it = opts.binning.find(out.name); it != opts.binning.end()) choice = it->second;
    BinningSpec spec;
    switch (choice.strategy) {
      case BinningStrategy::freedman_diaconis: spec = fd_bins(values); break;
      case BinningStrategy::fixed_width: spec = fixed_width_bins(values, choice.width); break;
      case BinningStrategy::explicit_edges: spec = explicit_bins(choice.edges); break;
    }
    out.series = discretize(values, spec);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bootstrap

std::pair<double, double> basic_bootstrap_interval(double estimate, std::vector<double> replicates,
                                                   double alpha) {
  if (replicates.empty()) return {estimate, estimate};
  std::sort(replicates.begin(), replicates.end());
  const double upper_q = quantile_sorted(replicates, 1.0 - alpha / 2.0);
  const double lower_q = quantile_sorted(replicates, alpha / 2.0);
  return {2.0 * estimate - upper_q, 2.0 * estimate - lower_q};
}

namespace {

// Resamples `n` indices with replacement per replicate and evaluates `stat`.
template <typename Stat>
std::vector<double> bootstrap(std::size_t n, int replicates, std::uint64_t seed, std::size_t jobs, Stat stat) {
  std::vector<double> values(static_cast<std::size_t>(std::max(replicates, 0)));
  parallel_for(values.size(), jobs, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, {std::string_view("bootstrap"), static_cast<std::int64_t>(r)}));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = pick(rng);
    values[r] = stat(idx);
  });
  return values;
}

AmiScore score_pairs(std::span<const int> x, int cx, std::span<const int> y, int cy,
                     std::span<const std::size_t> idx, AmiNormalization norm) {
  ContingencyTable t(static_cast<std::size_t>(cx), static_cast<std::size_t>(cy));
  for (auto i : idx) t.add(static_cast<std::size_t>(x[i]), static_cast<std::size_t>(y[i]));
  return adjusted_mi(t, norm);
}

}  // namespace

UtilityResult compute_utility(const CategoricalSeries& a, const CategoricalSeries& y, int replicates,
                              std::uint64_t seed, AmiNormalization norm, std::size_t jobs) {
  if (a.size() != y.size()) throw DataError("compute_utility: length mismatch");
  if (a.size() < 20) {
    throw InsufficientData("utility needs at least 20 rows, got " + std::to_string(a.size()));
  }
  a.validate();
  y.validate();
  UtilityResult out;
  out.score = adjusted_mi(contingency(a, y), norm);
  const auto ca = a.counts();
  const auto cy = y.counts();
  const bool a_single = std::count_if(ca.begin(), ca.end(), [](auto c) { return c > 0; }) <= 1;
  const bool y_single = std::count_if(cy.begin(), cy.end(), [](auto c) { return c > 0; }) <= 1;
  if (a_single || y_single) {
    out.warnings.push_back(std::string(a_single ? "attribute" : "label") +
                           " has a single category; utility is 0");
    out.score.ami = 0.0;
    out.ci_low = out.ci_high = 0.0;
    return out;
  }

  std::vector<std::size_t> all(a.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  auto stat = [&](std::span<const std::size_t> idx) {
    return score_pairs(a.codes, a.category_count(), y.codes, y.category_count(), idx, norm).ami;
  };
  auto reps = bootstrap(a.size(), replicates, seed, jobs, stat);
  std::tie(out.ci_low, out.ci_high) = basic_bootstrap_interval(out.score.ami, std::move(reps));
  if (replicates > 0 && (out.ci_low > out.score.ami || out.ci_high < out.score.ami)) {
    out.warnings.push_back("basic bootstrap interval excludes the point estimate (skewed bootstrap distribution)");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Detectability

namespace {

struct Partition {
  int label_code = -1;                 // -1: unconditioned
  std::vector<std::size_t> positions;  // into the attribute's rows
  FoldPlan plan;
};

struct Task {
  std::size_t spec_index;
  std::size_t partition;
  int fold;
};

// Size-weighted AMI over partitions; `part` gives each pair's partition.
AmiScore stratified_score(std::span<const int> truth, std::span<const int> pred, int classes,
                          std::span<const int> part, int parts, std::span<const std::size_t> idx,
                          AmiNormalization norm) {
  std::vector<ContingencyTable> tables(static_cast<std::size_t>(parts),
                                       ContingencyTable(static_cast<std::size_t>(classes), static_cast<std::size_t>(classes)));
  for (auto i : idx) {
    tables[static_cast<std::size_t>(part[i])].add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(pred[i]));
  }
  AmiScore total;
  const double n = static_cast<double>(idx.size());
  for (const auto& t : tables) {
    const auto m = t.total();
    if (m == 0) continue;
    const double w = static_cast<double>(m) / n;
    const AmiScore s = adjusted_mi(t, norm);
    total.mi += w * s.mi;
    total.emi += w * s.emi;
    total.h_row += w * s.h_row;
    total.h_col += w * s.h_col;
    total.ami += w * s.ami;
  }
  return total;
}

}  // namespace

std::vector<DetectionResult> detect_families(const Dataset& ds, const PreparedColumn& attribute,
                                             const std::vector<PredictorSpec>& specs,
                                             const PreparedColumn* label, const DetectOptions& opts) {
  if (!ds.encoded) throw DataError("detect_families expects an encoded dataset");
  if (specs.empty()) throw ConfigError("at least one model family is required");
  const int K = opts.folds;
  if (K < 2) throw ConfigError("K must be ≥ 2");
  const CategoricalSeries& a = attribute.series;
  const std::size_t n = a.size();
  const std::string& attr = attribute.name;
  std::vector<std::string> shared_warnings;

  // label code per attribute position (-1 when the label is missing)
  std::vector<int> label_code;
  int label_categories = 1;
  if (label != nullptr) {
    std::vector<int> by_row(ds.n_rows, -1);
    for (std::size_t j = 0; j < label->rows.size(); ++j) by_row[label->rows[j]] = label->series.codes[j];
    label_code.resize(n);
    for (std::size_t i = 0; i < n; ++i) label_code[i] = by_row[attribute.rows[i]];
    label_categories = label->series.category_count();
  }

  std::vector<Partition> partitions;
  std::set<int> used_labels;
  if (label != nullptr) {
    for (int c : label_code) {
      if (c >= 0) used_labels.insert(c);
    }
  }
  const bool conditioned = label != nullptr && used_labels.size() > 1;

  if (!conditioned) {
    if (n < kRowsPerFold * static_cast<std::size_t>(K)) {
      throw InsufficientData("attribute '" + attr + "' has " + std::to_string(n) + " usable rows; need at least " +
                             std::to_string(kRowsPerFold * static_cast<std::size_t>(K)) + " for K = " +
                             std::to_string(K));
    }
    Partition p;
    p.positions.resize(n);
    std::iota(p.positions.begin(), p.positions.end(), std::size_t{0});
    p.plan = plan_folds(n, K, &a, derive_seed(opts.seed, {std::string_view(attr), std::string_view("folds")}));
    partitions.push_back(std::move(p));
  } else {
    std::size_t unlabeled = 0;
    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(label_categories));
    for (std::size_t i = 0; i < n; ++i) {
      if (label_code[i] < 0) {
        ++unlabeled;
      } else {
        groups[static_cast<std::size_t>(label_code[i])].push_back(i);
      }
    }
    if (unlabeled > 0) {
      shared_warnings.push_back(std::to_string(unlabeled) + " rows without a label value were left out");
    }
    for (std::size_t v = 0; v < groups.size(); ++v) {
      auto& members = groups[v];
      if (members.empty()) continue;
      const std::string& vname = label->series.names[v];
      if (members.size() < kMinPartitionRows) {
        shared_warnings.push_back("label partition '" + vname + "' has " + std::to_string(members.size()) +
                                  " rows (< " + std::to_string(kMinPartitionRows) + "); excluded");
        continue;
      }
      int k_part = K;
      if (members.size() < kRowsPerFold * static_cast<std::size_t>(K)) {
        k_part = std::max(2, static_cast<int>(members.size() / kRowsPerFold));
        shared_warnings.push_back("label partition '" + vname + "' has " + std::to_string(members.size()) +
                                  " rows; K reduced to " + std::to_string(k_part));
      }
      const CategoricalSeries key = subset(a, members);
      Partition p;
      p.label_code = static_cast<int>(v);
      p.positions = std::move(members);
      p.plan = plan_folds(p.positions.size(), k_part, &key,
                          derive_seed(opts.seed, {std::string_view(attr), std::string_view("folds"),
                                                  std::string_view(vname)}));
      partitions.push_back(std::move(p));
    }
    if (partitions.empty()) {
      throw InsufficientData("attribute '" + attr + "': no label partition has enough rows");
    }
  }
  for (const auto& p : partitions) {
    for (const auto& w : p.plan.warnings) shared_warnings.push_back(w);
  }

  // one task per (family, partition, fold)
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (std::size_t p = 0; p < partitions.size(); ++p) {
      for (int f = 0; f < partitions[p].plan.k; ++f) tasks.push_back({s, p, f});
    }
  }
  FeatureLayout layout{ds.one_hot_groups};
  std::vector<FoldOutput> outputs(tasks.size());
  std::vector<std::vector<std::size_t>> test_positions(tasks.size());
  parallel_for(tasks.size(), opts.jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    const Partition& part = partitions[task.partition];
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t j = 0; j < part.positions.size(); ++j) {
      (part.plan.assignment[j] == task.fold ? test : train).push_back(part.positions[j]);
    }
    PredictorSpec spec = specs[task.spec_index];
    const std::string family(to_string(spec.family));
    const std::string vname = part.label_code < 0 ? std::string("*") : label->series.names[static_cast<std::size_t>(part.label_code)];
    spec.seed = derive_seed(opts.seed, {std::string_view(attr), std::string_view(family),
                                        std::string_view(vname), static_cast<std::int64_t>(task.fold)});
    std::string context = family + " fold " + std::to_string(task.fold);
    if (part.label_code >= 0) context += " (label " + vname + ")";
    outputs[t] = fit_predict_fold(ds.features, attribute.rows, a, spec, train, test, layout, context);
    test_positions[t] = std::move(test);
  });

  std::vector<DetectionResult> results(specs.size());
  std::vector<std::vector<int>> predicted(specs.size(), std::vector<int>(n, -1));
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& pred = predicted[tasks[t].spec_index];
    for (std::size_t j = 0; j < test_positions[t].size(); ++j) {
      const std::size_t pos = test_positions[t][j];
      if (pred[pos] != -1) throw std::logic_error("row predicted twice");
      pred[pos] = outputs[t].predictions[j];
    }
    for (auto& w : outputs[t].warnings) results[tasks[t].spec_index].warnings.push_back(std::move(w));
  }

  // partition index per position (for stratified scoring)
  std::vector<int> part_of(n, -1);
  for (std::size_t p = 0; p < partitions.size(); ++p) {
    for (auto pos : partitions[p].positions) part_of[pos] = static_cast<int>(p);
  }

  for (std::size_t s = 0; s < specs.size(); ++s) {
    DetectionResult& r = results[s];
    r.family = specs[s].family;
    r.warnings.insert(r.warnings.begin(), shared_warnings.begin(), shared_warnings.end());
    std::vector<int> truth;
    std::vector<int> pred;
    std::vector<int> part;
    for (std::size_t i = 0; i < n; ++i) {
      if (predicted[s][i] < 0) continue;
      r.rows.push_back(attribute.rows[i]);
      truth.push_back(a.codes[i]);
      pred.push_back(predicted[s][i]);
      part.push_back(part_of[i]);
    }
    r.n_scored = truth.size();
    r.truth.codes = truth;
    r.truth.names = a.names;
    r.predicted.codes = pred;
    r.predicted.names = a.names;

    const int classes = a.category_count();
    const bool stratified = conditioned && opts.conditioned_score == ConditionedScore::stratified;
    const int parts = static_cast<int>(partitions.size());
    auto stat = [&](std::span<const std::size_t> idx) {
      return stratified ? stratified_score(truth, pred, classes, part, parts, idx, opts.normalization)
                        : score_pairs(truth, classes, pred, classes, idx, opts.normalization);
    };
    std::vector<std::size_t> all(truth.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    r.score = stat(all);
    const std::uint64_t boot_seed = derive_seed(
        opts.seed, {std::string_view(attr), std::string_view(to_string(r.family)), std::string_view("ci")});
    auto reps = bootstrap(truth.size(), opts.bootstrap_replicates, boot_seed, opts.jobs,
                          [&](std::span<const std::size_t> idx) { return stat(idx).ami; });
    std::tie(r.ci_low, r.ci_high) = basic_bootstrap_interval(r.score.ami, std::move(reps));
  }
  return results;
}

namespace {

Dataset ensure_encoded(const Dataset& ds) { return ds.encoded ? ds : encode_features(ds); }

DetectOptions without_interval(DetectOptions opts) { return opts; }

}  // namespace

DetectionResult detect_unconditioned(const Dataset& ds, std::string_view attr, const PredictorSpec& spec,
                                     const DetectOptions& opts) {
  const Dataset enc = ensure_encoded(ds);
  const PreparedColumn prepared = prepare_attribute(enc, attr, opts.prep);
  auto results = detect_families(enc, prepared, {spec}, nullptr, without_interval(opts));
  auto r = std::move(results.front());
  r.warnings.insert(r.warnings.begin(), prepared.warnings.begin(), prepared.warnings.end());
  return r;
}

DetectionResult detect_conditioned(const Dataset& ds, std::string_view attr, const PredictorSpec& spec,
                                   const DetectOptions& opts) {
  const Dataset enc = ensure_encoded(ds);
  const PreparedColumn label = prepare_label(enc, opts.prep);
  const PreparedColumn prepared = prepare_attribute(enc, attr, opts.prep, &label.rows);
  auto results = detect_families(enc, prepared, {spec}, &label, opts);
  auto r = std::move(results.front());
  r.warnings.insert(r.warnings.begin(), prepared.warnings.begin(), prepared.warnings.end());
  return r;
}

// ---------------------------------------------------------------------------
// Audit

AuditOptions AuditOptions::with_all_families() {
  AuditOptions o;
  for (auto f : kAllFamilies) {
    PredictorSpec s;
    s.family = f;
    o.models.push_back(s);
  }
  return o;
}

AuditReport run_audit(const Dataset& raw, const AuditOptions& opts) {
  if (opts.folds < 2) throw ConfigError("K must be ≥ 2");
  if (opts.models.empty()) throw ConfigError("at least one model family is required");
  if (opts.bootstrap_replicates < 0) throw ConfigError("bootstrap replicates must be >= 0");
  std::vector<PredictorSpec> specs;
  for (const auto& m : opts.models) specs.push_back(complete(m));

  const Dataset ds = ensure_encoded(raw);
  AuditReport report;
  report.n_rows = ds.n_rows;
  report.raw_feature_columns = ds.raw_features.size();
  report.encoded_feature_columns = static_cast<std::size_t>(ds.features.cols());
  report.attribute_columns = ds.attributes.size();
  report.content_hash = fingerprint(ds);
  report.seed = opts.seed;

  std::vector<std::string> names = opts.attributes.empty() ? ds.attribute_names() : opts.attributes;
  for (const auto& n : names) {
    if (!ds.has_attribute(n)) throw ConfigError("unknown attribute '" + n + "'");
  }
  if (names.empty()) {
    report.warnings.push_back("no attributes configured; report is empty");
    return report;
  }

  const PreparedColumn label = prepare_label(ds, opts.prep);
  for (const auto& w : label.warnings) report.warnings.push_back("label: " + w);
  std::vector<std::size_t> base = label.rows;
  if (opts.missing_policy == MissingPolicy::strict) {
    const auto complete_rows = rows_with_all_attributes(ds, names);
    std::vector<std::size_t> both;
    std::set_intersection(base.begin(), base.end(), complete_rows.begin(), complete_rows.end(),
                          std::back_inserter(both));
    base = std::move(both);
  }
  std::vector<int> label_by_row(ds.n_rows, -1);
  for (std::size_t j = 0; j < label.rows.size(); ++j) label_by_row[label.rows[j]] = label.series.codes[j];

  DetectOptions dopts;
  dopts.folds = opts.folds;
  dopts.seed = opts.seed;
  dopts.jobs = opts.jobs;
  dopts.bootstrap_replicates = opts.bootstrap_replicates;
  dopts.normalization = opts.normalization;
  dopts.conditioned_score = opts.conditioned_score;
  dopts.prep = opts.prep;

  // attributes run side by side; leftover workers go to each attribute's fits
  const std::size_t jobs = opts.jobs == 0 ? default_jobs() : opts.jobs;
  const std::size_t outer = std::min(jobs, names.size());
  dopts.jobs = std::max<std::size_t>(1, jobs / outer);
  report.attributes.resize(names.size());
  parallel_for(names.size(), outer, [&](std::size_t index) {
    const std::string& name = names[index];
    AttributeAudit audit;
    audit.name = name;
    audit.mode = opts.direction;
    try {
      const PreparedColumn attr = prepare_attribute(ds, name, opts.prep, &base);
      audit.warnings = attr.warnings;
      audit.n_used = attr.rows.size();
      audit.categories = attr.series.names;

      CategoricalSeries y;
      y.names = label.series.names;
      for (auto r : attr.rows) y.codes.push_back(label_by_row[r]);
      const UtilityResult util =
          compute_utility(attr.series, y, opts.bootstrap_replicates,
                          derive_seed(opts.seed, {std::string_view(name), std::string_view("utility")}),
                          opts.normalization, dopts.jobs);
      audit.utility = util.score;
      audit.utility_ci_low = util.ci_low;
      audit.utility_ci_high = util.ci_high;
      for (const auto& w : util.warnings) audit.warnings.push_back("utility: " + w);

      if (attr.series.category_count() <= 1) {
        audit.warnings.push_back("detectability: attribute has a single category; scored 0");
        for (const auto& s : specs) audit.detectability.push_back({s.family, AmiScore{}, 0.0, 0.0});
      } else {
        const bool conditioned = opts.direction == DirectionMode::anticausal_y_to_x;
        auto results = detect_families(ds, attr, specs, conditioned ? &label : nullptr, dopts);
        std::set<std::string> seen;
        for (auto& r : results) {
          audit.detectability.push_back({r.family, r.score, r.ci_low, r.ci_high});
          for (const auto& w : r.warnings) {
            const std::string msg = std::string(to_string(r.family)) + ": " + w;
            if (seen.insert(msg).second) audit.warnings.push_back(msg);
          }
        }
      }
      audit.detectability_ensemble = -std::numeric_limits<double>::infinity();
      for (const auto& d : audit.detectability) {
        if (d.score.ami > audit.detectability_ensemble) {
          audit.detectability_ensemble = d.score.ami;
          audit.ensemble_family = std::string(to_string(d.family));
        }
      }
      audit.rank_score = audit.detectability_ensemble * std::max(audit.utility.ami, 0.0);
    } catch (const std::exception& e) {
      audit.ok = false;
      audit.error = e.what();
      audit.detectability.clear();
      audit.detectability_ensemble = 0.0;
      audit.rank_score = 0.0;
    }
    report.attributes[index] = std::move(audit);
  });

  std::stable_sort(report.attributes.begin(), report.attributes.end(),
                   [](const AttributeAudit& x, const AttributeAudit& y) {
                     if (x.ok != y.ok) return x.ok;
                     return x.rank_score > y.rank_score;
                   });
  return report;
}

}  // namespace gaudit
