#include "gaudit/split_probe.hpp"

#include <algorithm>

#include "gaudit/errors.hpp"
#include "gaudit/metrics.hpp"
#include "gaudit/seeding.hpp"

namespace gaudit {

double uniform_guess_f1(const CategoricalSeries& truth) {
  if (truth.size() == 0) return 0.0;
  const auto counts = truth.counts();
  const double q = 1.0 / static_cast<double>(counts.size());
  double sum = 0.0;
  for (auto c : counts) {
    const double prior = static_cast<double>(c) / static_cast<double>(truth.size());
    sum += 2.0 * prior * q / (prior + q);
  }
  return sum / static_cast<double>(counts.size());
}

double majority_class_f1(const CategoricalSeries& truth) {
  if (truth.size() == 0) return 0.0;
  const auto counts = truth.counts();
  const auto top = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  const std::vector<int> pred(truth.size(), top);
  return macro_f1(pred, truth.codes, truth.category_count());
}

FittedModel fit_task_model(const Dataset& encoded, const PredictorSpec& spec) {
  if (!encoded.encoded) throw DataError("fit_task_model expects an encoded dataset");
  const PreparedColumn label = prepare_label(encoded, PrepOptions{});
  return fit(spec, take_rows(encoded.features, label.rows), label.series, FeatureLayout{encoded.one_hot_groups});
}

ProbeResult split_probe(const FittedModel& task_model, const Dataset& encoded, std::string_view attr, int folds,
                        std::uint64_t seed, const PrepOptions& prep, std::size_t jobs) {
  if (!task_model.has_representation()) {
    throw ModelError("family '" + std::string(to_string(task_model.spec().family)) +
                     "' has no hidden representation to probe");
  }
  if (!encoded.encoded) throw DataError("split_probe expects an encoded dataset");
  const PreparedColumn a = prepare_attribute(encoded, attr, prep);

  ProbeResult out;
  out.attribute = std::string(attr);
  out.folds = folds;
  out.n_used = a.rows.size();
  out.warnings = a.warnings;

  const std::uint64_t before = task_model.parameter_hash();
  const Eigen::MatrixXd reps = representation(task_model, take_rows(encoded.features, a.rows));

  PredictorSpec probe;
  probe.family = ModelFamily::logistic_regression;
  probe.seed = derive_seed(seed, {std::string_view("probe"), attr});
  const FoldPlan plan = plan_folds(a.rows.size(), folds, &a.series,
                                   derive_seed(seed, {std::string_view("probe folds"), attr}));
  const CrossValResult cv = cross_val_predict(reps, a.series, probe, plan, {}, jobs);
  for (const auto& w : cv.warnings) out.warnings.push_back(w);
  if (task_model.parameter_hash() != before) throw std::logic_error("probe training changed the task model");

  out.macro_f1 = macro_f1(cv.predicted, a.series);
  out.accuracy = accuracy(cv.predicted, a.series);
  out.chance_f1 = uniform_guess_f1(a.series);
  out.majority_f1 = majority_class_f1(a.series);
  return out;
}

double correlate_detectability(const AuditReport& audit, const std::vector<ProbeResult>& probes) {
  std::vector<double> detect;
  std::vector<double> f1;
  for (const auto& p : probes) {
    for (const auto& a : audit.attributes) {
      if (a.ok && a.name == p.attribute) {
        detect.push_back(a.detectability_ensemble);
        f1.push_back(p.macro_f1);
        break;
      }
    }
  }
  if (detect.size() < 3) {
    throw DataError("rank correlation needs at least 3 shared attributes, got " + std::to_string(detect.size()));
  }
  return spearman(detect, f1);
}

}  // namespace gaudit
