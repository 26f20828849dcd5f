// Multinomial logistic regression trained by full-batch gradient descent on
// the class-weighted softmax cross-entropy with an L2 penalty on the weights.

#include <cmath>

#include "gaudit/models.hpp"

namespace gaudit::detail {

namespace {

class LinearEstimator final : public Estimator {
 public:
  // `classes[k]` is the output column of the k-th row of `layer`.
  LinearEstimator(LinearLayer layer, Standardizer scaling, std::vector<int> classes, int class_count,
                  bool binary_single_row)
      : layer_(std::move(layer)),
        scaling_(std::move(scaling)),
        classes_(std::move(classes)),
        class_count_(class_count),
        binary_single_row_(binary_single_row) {}

  Eigen::MatrixXd proba(const Eigen::MatrixXd& X) const override {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, class_count_);
    if (classes_.size() == 1) {
      out.col(classes_.front()).setOnes();
      return out;
    }
    const Eigen::MatrixXd Xs = scaling_.apply(X);
    Eigen::MatrixXd scores = (Xs * layer_.weight.transpose()).rowwise() + layer_.bias.transpose();
    if (binary_single_row_) {
      Eigen::MatrixXd two(n, 2);
      two.col(0).setZero();
      two.col(1) = scores.col(0);
      scores = std::move(two);
    }
    softmax_rows(scores);
    for (std::size_t k = 0; k < classes_.size(); ++k) {
      out.col(classes_[k]) = scores.col(static_cast<Eigen::Index>(k));
    }
    return out;
  }

  void hash_parameters(HashSink& sink) const override {
    sink.add(layer_.weight);
    sink.add(layer_.bias);
    sink.add(Eigen::MatrixXd(scaling_.mean));
    sink.add(Eigen::MatrixXd(scaling_.scale));
  }

 private:
  LinearLayer layer_;
  Standardizer scaling_;
  std::vector<int> classes_;
  int class_count_;
  bool binary_single_row_;
};

}  // namespace

std::shared_ptr<const Estimator> linear_estimator(LinearLayer layer, Standardizer scaling,
                                                  bool binary_single_row) {
  const int classes = binary_single_row ? 2 : static_cast<int>(layer.weight.rows());
  std::vector<int> order(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) order[static_cast<std::size_t>(c)] = c;
  return std::make_shared<LinearEstimator>(std::move(layer), std::move(scaling), std::move(order),
                                           classes, binary_single_row);
}

std::shared_ptr<const Estimator> fit_logistic(const std::map<std::string, double>& hp,
                                              const Eigen::MatrixXd& X, const CategoricalSeries& y) {
  const double lr = hp.at("learning_rate");
  const auto epochs = static_cast<int>(hp.at("epochs"));
  const double l2 = hp.at("l2");
  const bool balanced = hp.at("balanced") != 0.0;

  const auto counts = y.counts();
  std::vector<int> present;
  std::vector<int> slot(counts.size(), -1);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) {
      slot[c] = static_cast<int>(present.size());
      present.push_back(static_cast<int>(c));
    }
  }

  Standardizer scaling = Standardizer::fit(X);
  const auto K = static_cast<Eigen::Index>(present.size());
  LinearLayer layer{Eigen::MatrixXd::Zero(K, X.cols()), Eigen::VectorXd::Zero(K)};
  if (K <= 1) {
    return std::make_shared<LinearEstimator>(std::move(layer), std::move(scaling), present,
                                             y.category_count(), false);
  }

  const Eigen::MatrixXd Xs = scaling.apply(X);
  const Eigen::Index n = Xs.rows();
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(n, K);
  for (Eigen::Index i = 0; i < n; ++i) target(i, slot[static_cast<std::size_t>(y.codes[static_cast<std::size_t>(i)])]) = 1.0;
  Eigen::VectorXd w = class_weights(y, balanced);
  w /= w.sum();

  Eigen::MatrixXd scores(n, K);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    scores.noalias() = Xs * layer.weight.transpose();
    scores.rowwise() += layer.bias.transpose();
    softmax_rows(scores);
    scores -= target;
    scores.array().colwise() *= w.array();
    const Eigen::MatrixXd grad_w = scores.transpose() * Xs + l2 * layer.weight;
    const Eigen::VectorXd grad_b = scores.colwise().sum().transpose();
    layer.weight -= lr * grad_w;
    layer.bias -= lr * grad_b;
  }
  return std::make_shared<LinearEstimator>(std::move(layer), std::move(scaling), present,
                                           y.category_count(), false);
}

}  // namespace gaudit::detail
