// One-hidden-layer tanh network with a softmax output, trained by seeded
// mini-batch SGD on the class-weighted cross-entropy.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gaudit/models.hpp"

namespace gaudit::detail {

namespace {

class MlpEstimator final : public Estimator {
 public:
  MlpEstimator(MlpWeights weights, Standardizer scaling, std::vector<std::uint8_t> present)
      : weights_(std::move(weights)), scaling_(std::move(scaling)), present_(std::move(present)) {}

  Eigen::MatrixXd hidden(const Eigen::MatrixXd& X) const override {
    Eigen::MatrixXd z = scaling_.apply(X) * weights_.hidden.weight.transpose();
    z.rowwise() += weights_.hidden.bias.transpose();
    return z.array().tanh().matrix();
  }

  Eigen::MatrixXd proba(const Eigen::MatrixXd& X) const override {
    Eigen::MatrixXd s = hidden(X) * weights_.output.weight.transpose();
    s.rowwise() += weights_.output.bias.transpose();
    for (std::size_t c = 0; c < present_.size(); ++c) {
      if (!present_[c]) s.col(static_cast<Eigen::Index>(c)).setConstant(-std::numeric_limits<double>::infinity());
    }
    softmax_rows(s);
    return s;
  }

  const LinearLayer* output_layer() const override { return &weights_.output; }

  void hash_parameters(HashSink& sink) const override {
    sink.add(weights_.hidden.weight);
    sink.add(weights_.hidden.bias);
    sink.add(weights_.output.weight);
    sink.add(weights_.output.bias);
    sink.add(Eigen::MatrixXd(scaling_.mean));
    sink.add(Eigen::MatrixXd(scaling_.scale));
  }

 private:
  MlpWeights weights_;
  Standardizer scaling_;
  std::vector<std::uint8_t> present_;
};

}  // namespace

std::shared_ptr<const Estimator> mlp_estimator(MlpWeights weights, Standardizer scaling) {
  std::vector<std::uint8_t> present(static_cast<std::size_t>(weights.output.weight.rows()), 1);
  return std::make_shared<MlpEstimator>(std::move(weights), std::move(scaling), std::move(present));
}

double mlp_loss(const MlpWeights& w, const Eigen::MatrixXd& X, const Eigen::MatrixXd& targets,
                const Eigen::VectorXd& sample_weight, MlpWeights* grad) {
  Eigen::MatrixXd h = X * w.hidden.weight.transpose();
  h.rowwise() += w.hidden.bias.transpose();
  h = h.array().tanh().matrix();
  Eigen::MatrixXd p = h * w.output.weight.transpose();
  p.rowwise() += w.output.bias.transpose();
  softmax_rows(p);

  const double total = sample_weight.sum();
  const Eigen::VectorXd picked = (p.array() * targets.array()).rowwise().sum();
  const double loss = -(sample_weight.array() * picked.array().max(1e-300).log()).sum() / total;
  if (grad == nullptr) return loss;

  Eigen::MatrixXd ds = p - targets;
  ds.array().colwise() *= sample_weight.array() / total;
  grad->output.weight.noalias() = ds.transpose() * h;
  grad->output.bias = ds.colwise().sum().transpose();
  Eigen::MatrixXd dz = ds * w.output.weight;
  dz.array() *= 1.0 - h.array().square();
  grad->hidden.weight.noalias() = dz.transpose() * X;
  grad->hidden.bias = dz.colwise().sum().transpose();
  return loss;
}

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

MlpWeights zeros_like(const MlpWeights& w) {
  MlpWeights z;
  z.hidden.weight = Eigen::MatrixXd::Zero(w.hidden.weight.rows(), w.hidden.weight.cols());
  z.hidden.bias = Eigen::VectorXd::Zero(w.hidden.bias.size());
  z.output.weight = Eigen::MatrixXd::Zero(w.output.weight.rows(), w.output.weight.cols());
  z.output.bias = Eigen::VectorXd::Zero(w.output.bias.size());
  return z;
}

// One Adam update; c1 and c2 are the bias corrections for this step.
template <typename T>
void adam(T& param, const T& grad, T& m, T& v, double lr, double c1, double c2) {
  m = kBeta1 * m + (1.0 - kBeta1) * grad;
  v.array() = kBeta2 * v.array() + (1.0 - kBeta2) * grad.array().square();
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kAdamEps);
}

}  // namespace

std::shared_ptr<const Estimator> fit_mlp(const std::map<std::string, double>& hp,
                                         const Eigen::MatrixXd& X, const CategoricalSeries& y,
                                         std::uint64_t seed) {
  const auto width = static_cast<Eigen::Index>(hp.at("hidden"));
  const double lr = hp.at("learning_rate");
  const auto epochs = static_cast<int>(hp.at("epochs"));
  const auto batch = static_cast<std::size_t>(hp.at("batch_size"));
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
  const auto K = static_cast<Eigen::Index>(present.size());
  const Eigen::Index D = X.cols();

  std::mt19937_64 rng(seed);
  auto uniform = [&](Eigen::Index rows, Eigen::Index cols, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    }
    return m;
  };
  MlpWeights w;
  w.hidden.weight = uniform(width, D, 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(D, 1))));
  w.hidden.bias = Eigen::VectorXd::Zero(width);
  w.output.weight = uniform(K, width, 1.0 / std::sqrt(static_cast<double>(width)));
  w.output.bias = Eigen::VectorXd::Zero(K);

  Standardizer scaling = Standardizer::fit(X);
  if (K > 1) {
    const Eigen::MatrixXd Xs = scaling.apply(X);
    const Eigen::Index n = Xs.rows();
    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(n, K);
    for (Eigen::Index i = 0; i < n; ++i) {
      targets(i, slot[static_cast<std::size_t>(y.codes[static_cast<std::size_t>(i)])]) = 1.0;
    }
    const Eigen::VectorXd sw = class_weights(y, balanced);

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), std::size_t{0});
    MlpWeights g = w;
    MlpWeights m1 = zeros_like(w);
    MlpWeights m2 = zeros_like(w);
    std::int64_t step = 0;
    Eigen::MatrixXd xb;
    Eigen::MatrixXd tb;
    Eigen::VectorXd wb;
    for (int epoch = 0; epoch < epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t stop = std::min(order.size(), start + batch);
        const auto m = static_cast<Eigen::Index>(stop - start);
        xb.resize(m, D);
        tb.resize(m, K);
        wb.resize(m);
        for (Eigen::Index r = 0; r < m; ++r) {
          const auto src = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(r)]);
          xb.row(r) = Xs.row(src);
          tb.row(r) = targets.row(src);
          wb(r) = sw(src);
        }
        mlp_loss(w, xb, tb, wb, &g);
        ++step;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        adam(w.hidden.weight, g.hidden.weight, m1.hidden.weight, m2.hidden.weight, lr, c1, c2);
        adam(w.hidden.bias, g.hidden.bias, m1.hidden.bias, m2.hidden.bias, lr, c1, c2);
        adam(w.output.weight, g.output.weight, m1.output.weight, m2.output.weight, lr, c1, c2);
        adam(w.output.bias, g.output.bias, m1.output.bias, m2.output.bias, lr, c1, c2);
      }
    }
  }

  // expand the output layer to every declared class; unseen classes are masked
  const auto C = static_cast<Eigen::Index>(counts.size());
  MlpWeights full;
  full.hidden = w.hidden;
  full.output.weight = Eigen::MatrixXd::Zero(C, width);
  full.output.bias = Eigen::VectorXd::Zero(C);
  std::vector<std::uint8_t> mask(counts.size(), 0);
  for (Eigen::Index k = 0; k < K; ++k) {
    const int c = present[static_cast<std::size_t>(k)];
    full.output.weight.row(c) = w.output.weight.row(k);
    full.output.bias(c) = w.output.bias(k);
    mask[static_cast<std::size_t>(c)] = 1;
  }
  return std::make_shared<MlpEstimator>(std::move(full), std::move(scaling), std::move(mask));
}

}  // namespace gaudit::detail
