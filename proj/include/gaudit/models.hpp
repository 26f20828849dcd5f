#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gaudit/dataset.hpp"

namespace gaudit {

enum class ModelFamily { logistic_regression, decision_tree, naive_bayes, mlp };

inline constexpr std::array<ModelFamily, 4> kAllFamilies = {
    ModelFamily::logistic_regression, ModelFamily::decision_tree, ModelFamily::naive_bayes,
    ModelFamily::mlp};

std::string_view to_string(ModelFamily family);
ModelFamily parse_family(std::string_view text);

/// Model family plus hyperparameters. Unset hyperparameters take the family
/// defaults (see default_hyperparameters); unknown names are rejected by fit.
struct PredictorSpec {
  ModelFamily family = ModelFamily::logistic_regression;
  std::map<std::string, double> hyperparameters;
  std::uint64_t seed = 0;
};

std::map<std::string, double> default_hyperparameters(ModelFamily family);
/// Fills defaults and rejects unknown or out-of-range hyperparameters.
PredictorSpec complete(const PredictorSpec& spec);

/// Column grouping hints. Columns listed in a group are the one-hot expansion
/// of a single categorical feature.
struct FeatureLayout {
  std::vector<std::vector<std::size_t>> one_hot_groups;
};

struct LinearLayer {
  Eigen::MatrixXd weight;  // outputs x inputs
  Eigen::VectorXd bias;
};

namespace detail {
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual Eigen::MatrixXd proba(const Eigen::MatrixXd& X) const = 0;
  virtual Eigen::MatrixXd hidden(const Eigen::MatrixXd& X) const;
  virtual const LinearLayer* output_layer() const { return nullptr; }
  virtual void hash_parameters(class HashSink& sink) const = 0;
};
}  // namespace detail

/// Immutable trained model; cheap to copy and safe to share across threads.
class FittedModel {
 public:
  FittedModel(PredictorSpec spec, int class_count, std::size_t feature_count,
              std::shared_ptr<const detail::Estimator> impl);

  const PredictorSpec& spec() const { return spec_; }
  int class_count() const { return class_count_; }
  std::size_t feature_count() const { return feature_count_; }
  bool has_representation() const { return spec_.family == ModelFamily::mlp; }
  /// The layer that maps representation() to class scores (mlp only).
  const LinearLayer& final_layer() const;
  /// Digest of every learned parameter.
  std::uint64_t parameter_hash() const;

  const detail::Estimator& impl() const { return *impl_; }

 private:
  PredictorSpec spec_;
  int class_count_;
  std::size_t feature_count_;
  std::shared_ptr<const detail::Estimator> impl_;
};

/// Trains on X (N x D) against y. Classes of y that never occur still get a
/// (zero-mass) output column. Deterministic given (spec, X, y).
FittedModel fit(const PredictorSpec& spec, const Eigen::MatrixXd& X, const CategoricalSeries& y,
                const FeatureLayout& layout = {});

Eigen::MatrixXd predict_proba(const FittedModel& m, const Eigen::MatrixXd& X);
/// Row-wise argmax of predict_proba; ties go to the lowest class code.
CategoricalSeries predict(const FittedModel& m, const Eigen::MatrixXd& X);
/// Post-activation hidden layer outputs (mlp only).
Eigen::MatrixXd representation(const FittedModel& m, const Eigen::MatrixXd& X);

/// Softmax-linear model with explicit weights and no input scaling. With two
/// classes, a single weight row is read as the class-1 score (class 0 scores 0).
FittedModel make_linear_model(const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias);

struct MlpWeights {
  LinearLayer hidden;
  LinearLayer output;
};
/// One-hidden-layer tanh network with explicit weights and no input scaling.
FittedModel make_mlp(const MlpWeights& weights);

namespace detail {

class HashSink {
 public:
  void add(const Eigen::MatrixXd& m);
  void add(const Eigen::VectorXd& v);
  void add(double v);
  void add(std::int64_t v);
  std::uint64_t digest() const { return state_; }

 private:
  void bytes(const void* p, std::size_t n);
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// Per-column mean/scale learned on training data.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;
  static Standardizer fit(const Eigen::MatrixXd& X);
  static Standardizer identity(Eigen::Index d);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

/// Per-sample weights; inverse class frequency when balanced, else all 1.
Eigen::VectorXd class_weights(const CategoricalSeries& y, bool balanced);
Eigen::MatrixXd one_hot(const CategoricalSeries& y);
void softmax_rows(Eigen::MatrixXd& scores);

/// Weighted mean cross-entropy of the mlp on (X, targets), with gradients
/// written to `grad` when non-null. Exposed for gradient checking.
double mlp_loss(const MlpWeights& w, const Eigen::MatrixXd& X, const Eigen::MatrixXd& targets,
                const Eigen::VectorXd& sample_weight, MlpWeights* grad);

std::shared_ptr<const Estimator> fit_logistic(const std::map<std::string, double>& hp,
                                              const Eigen::MatrixXd& X, const CategoricalSeries& y);
std::shared_ptr<const Estimator> fit_tree(const std::map<std::string, double>& hp,
                                          const Eigen::MatrixXd& X, const CategoricalSeries& y);
std::shared_ptr<const Estimator> fit_naive_bayes(const std::map<std::string, double>& hp,
                                                 const Eigen::MatrixXd& X, const CategoricalSeries& y,
                                                 const FeatureLayout& layout);
std::shared_ptr<const Estimator> fit_mlp(const std::map<std::string, double>& hp,
                                         const Eigen::MatrixXd& X, const CategoricalSeries& y,
                                         std::uint64_t seed);
std::shared_ptr<const Estimator> linear_estimator(LinearLayer layer, Standardizer scaling,
                                                  bool binary_single_row);
std::shared_ptr<const Estimator> mlp_estimator(MlpWeights weights, Standardizer scaling);

}  // namespace detail

}  // namespace gaudit
