#include <algorithm>
#include <cmath>

#include "gaudit/errors.hpp"
#include "gaudit/models.hpp"

namespace gaudit {

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::logistic_regression: return "logistic_regression";
    case ModelFamily::decision_tree: return "decision_tree";
    case ModelFamily::naive_bayes: return "naive_bayes";
    case ModelFamily::mlp: return "mlp";
  }
  return "?";
}

ModelFamily parse_family(std::string_view text) {
  for (auto f : kAllFamilies) {
    if (to_string(f) == text) return f;
  }
  throw ModelError("unknown model family '" + std::string(text) + "'");
}

std::map<std::string, double> default_hyperparameters(ModelFamily family) {
  switch (family) {
    case ModelFamily::logistic_regression:
      return {{"learning_rate", 0.1}, {"epochs", 500}, {"l2", 1e-4}, {"balanced", 1}};
    case ModelFamily::decision_tree:
      return {{"max_depth", 12}, {"min_leaf", 5}, {"balanced", 1}};
    case ModelFamily::naive_bayes:
      return {{"var_smoothing", 1e-9}, {"alpha", 1.0}, {"balanced", 1}};
    case ModelFamily::mlp:
      return {{"hidden", 64},     {"learning_rate", 0.01}, {"epochs", 30},
              {"batch_size", 64}, {"balanced", 1}};
  }
  return {};
}

PredictorSpec complete(const PredictorSpec& spec) {
  PredictorSpec out = spec;
  auto defaults = default_hyperparameters(spec.family);
  for (const auto& [name, value] : spec.hyperparameters) {
    if (!defaults.count(name)) {
      throw ModelError("unknown hyperparameter '" + name + "' for " +
                       std::string(to_string(spec.family)));
    }
    if (!std::isfinite(value) || value < 0.0) {
      throw ModelError("hyperparameter '" + name + "' must be a non-negative number");
    }
  }
  for (const auto& [name, value] : defaults) out.hyperparameters.emplace(name, value);
  const auto& hp = out.hyperparameters;
  auto positive = [&](const char* name) {
    if (!(hp.at(name) > 0.0)) throw ModelError(std::string(name) + " must be positive");
  };
  switch (spec.family) {
    case ModelFamily::logistic_regression:
      positive("learning_rate");
      break;
    case ModelFamily::decision_tree:
      positive("max_depth");
      positive("min_leaf");
      break;
    case ModelFamily::naive_bayes:
      positive("var_smoothing");
      break;
    case ModelFamily::mlp:
      positive("hidden");
      positive("learning_rate");
      positive("batch_size");
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------

FittedModel::FittedModel(PredictorSpec spec, int class_count, std::size_t feature_count,
                         std::shared_ptr<const detail::Estimator> impl)
    : spec_(std::move(spec)),
      class_count_(class_count),
      feature_count_(feature_count),
      impl_(std::move(impl)) {}

const LinearLayer& FittedModel::final_layer() const {
  const LinearLayer* layer = impl_->output_layer();
  if (!has_representation() || layer == nullptr) {
    throw ModelError(std::string(to_string(spec_.family)) + " has no representation layer");
  }
  return *layer;
}

std::uint64_t FittedModel::parameter_hash() const {
  detail::HashSink sink;
  impl_->hash_parameters(sink);
  return sink.digest();
}

Eigen::MatrixXd detail::Estimator::hidden(const Eigen::MatrixXd&) const {
  throw ModelError("model family has no representation");
}

FittedModel fit(const PredictorSpec& raw_spec, const Eigen::MatrixXd& X, const CategoricalSeries& y,
                const FeatureLayout& layout) {
  const PredictorSpec spec = complete(raw_spec);
  y.validate();
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw ModelError("fit: X has " + std::to_string(X.rows()) + " rows but y has " +
                     std::to_string(y.size()));
  }
  const auto n = static_cast<std::size_t>(X.rows());
  if (n == 0) throw ModelError("fit: no training rows");
  if (static_cast<std::size_t>(y.category_count()) > n) {
    throw ModelError("fit: class count " + std::to_string(y.category_count()) +
                     " exceeds row count " + std::to_string(n));
  }
  if (!X.allFinite()) throw ModelError("fit: non-finite feature values");

  std::shared_ptr<const detail::Estimator> impl;
  switch (spec.family) {
    case ModelFamily::logistic_regression: impl = detail::fit_logistic(spec.hyperparameters, X, y); break;
    case ModelFamily::decision_tree: impl = detail::fit_tree(spec.hyperparameters, X, y); break;
    case ModelFamily::naive_bayes:
      impl = detail::fit_naive_bayes(spec.hyperparameters, X, y, layout);
      break;
    case ModelFamily::mlp: impl = detail::fit_mlp(spec.hyperparameters, X, y, spec.seed); break;
  }
  return FittedModel(spec, y.category_count(), static_cast<std::size_t>(X.cols()), std::move(impl));
}

namespace {

void check_dims(const FittedModel& m, const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.cols()) != m.feature_count()) {
    throw ModelError("dimension mismatch: model expects " + std::to_string(m.feature_count()) +
                     " features, got " + std::to_string(X.cols()));
  }
}

}  // namespace

Eigen::MatrixXd predict_proba(const FittedModel& m, const Eigen::MatrixXd& X) {
  check_dims(m, X);
  return m.impl().proba(X);
}

CategoricalSeries predict(const FittedModel& m, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd p = predict_proba(m, X);
  CategoricalSeries out;
  out.names.reserve(static_cast<std::size_t>(m.class_count()));
  for (int c = 0; c < m.class_count(); ++c) out.names.push_back(std::to_string(c));
  out.codes.resize(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < p.cols(); ++c) {
      if (p(i, c) > p(i, best)) best = c;
    }
    out.codes[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Eigen::MatrixXd representation(const FittedModel& m, const Eigen::MatrixXd& X) {
  if (!m.has_representation()) {
    throw ModelError(std::string(to_string(m.spec().family)) + " does not expose a representation");
  }
  check_dims(m, X);
  return m.impl().hidden(X);
}

FittedModel make_linear_model(const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias) {
  if (weight.rows() != bias.size()) throw ModelError("weight rows must match bias length");
  const bool binary = weight.rows() == 1;
  const int classes = binary ? 2 : static_cast<int>(weight.rows());
  PredictorSpec spec;
  spec.family = ModelFamily::logistic_regression;
  spec = complete(spec);
  return FittedModel(spec, classes, static_cast<std::size_t>(weight.cols()),
                     detail::linear_estimator({weight, bias}, detail::Standardizer::identity(weight.cols()),
                                              binary));
}

FittedModel make_mlp(const MlpWeights& w) {
  if (w.hidden.weight.rows() != w.output.weight.cols() || w.hidden.bias.size() != w.hidden.weight.rows() ||
      w.output.bias.size() != w.output.weight.rows()) {
    throw ModelError("inconsistent mlp layer shapes");
  }
  PredictorSpec spec;
  spec.family = ModelFamily::mlp;
  spec.hyperparameters["hidden"] = static_cast<double>(w.hidden.weight.rows());
  spec = complete(spec);
  return FittedModel(spec, static_cast<int>(w.output.weight.rows()),
                     static_cast<std::size_t>(w.hidden.weight.cols()),
                     detail::mlp_estimator(w, detail::Standardizer::identity(w.hidden.weight.cols())));
}

// ---------------------------------------------------------------------------
// shared helpers

namespace detail {

void HashSink::bytes(const void* p, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n; ++i) {
    state_ ^= b[i];
    state_ *= 0x100000001b3ULL;
  }
}

void HashSink::add(const Eigen::MatrixXd& m) {
  add(static_cast<std::int64_t>(m.rows()));
  add(static_cast<std::int64_t>(m.cols()));
  bytes(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
}

void HashSink::add(const Eigen::VectorXd& v) {
  add(static_cast<std::int64_t>(v.size()));
  bytes(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
}

void HashSink::add(double v) { bytes(&v, sizeof v); }
void HashSink::add(std::int64_t v) { bytes(&v, sizeof v); }

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
  Standardizer s;
  const double n = static_cast<double>(X.rows());
  s.mean = X.colwise().sum() / n;
  s.scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var = (X.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(j) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(Eigen::Index d) {
  Standardizer s;
  s.mean = Eigen::RowVectorXd::Zero(d);
  s.scale = Eigen::RowVectorXd::Ones(d);
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  return (X.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::VectorXd class_weights(const CategoricalSeries& y, bool balanced) {
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (!balanced) return w;
  const auto counts = y.counts();
  const auto present = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto c = counts[static_cast<std::size_t>(y.codes[static_cast<std::size_t>(i)])];
    w(i) = static_cast<double>(n) / (static_cast<double>(present) * static_cast<double>(c));
  }
  return w;
}

Eigen::MatrixXd one_hot(const CategoricalSeries& y) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(y.size()), y.category_count());
  for (std::size_t i = 0; i < y.size(); ++i) t(static_cast<Eigen::Index>(i), y.codes[i]) = 1.0;
  return t;
}

void softmax_rows(Eigen::MatrixXd& scores) {
  const Eigen::VectorXd peak = scores.rowwise().maxCoeff();
  scores = (scores.colwise() - peak).array().exp();
  const Eigen::VectorXd total = scores.rowwise().sum();
  scores.array().colwise() /= total.array();
}

}  // namespace detail

}  // namespace gaudit
