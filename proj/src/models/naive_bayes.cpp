// Naive Bayes: Gaussian likelihood for ordinary columns, smoothed categorical
// likelihood for each one-hot group.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "gaudit/models.hpp"

namespace gaudit::detail {

namespace {

struct Group {
  std::vector<std::size_t> columns;
  Eigen::MatrixXd log_prob;  // present classes x (columns + 1); last state = "none set"
};

int active_state(const Eigen::MatrixXd& X, Eigen::Index row, const std::vector<std::size_t>& cols) {
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (X(row, static_cast<Eigen::Index>(cols[k])) > 0.5) return static_cast<int>(k);
  }
  return static_cast<int>(cols.size());
}

// Order-independent sum: accumulate in sorted order.
double stable_sum(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

class NaiveBayesEstimator final : public Estimator {
 public:
  NaiveBayesEstimator(std::vector<int> classes, int class_count, Eigen::VectorXd log_prior,
                      std::vector<std::size_t> gaussian_cols, Eigen::MatrixXd mean, Eigen::MatrixXd var,
                      std::vector<Group> groups)
      : classes_(std::move(classes)),
        class_count_(class_count),
        log_prior_(std::move(log_prior)),
        gaussian_cols_(std::move(gaussian_cols)),
        mean_(std::move(mean)),
        var_(std::move(var)),
        groups_(std::move(groups)) {}

  Eigen::MatrixXd proba(const Eigen::MatrixXd& X) const override {
    const Eigen::Index n = X.rows();
    const auto K = static_cast<Eigen::Index>(classes_.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, class_count_);
    if (K == 1) {
      out.col(classes_.front()).setOnes();
      return out;
    }
    Eigen::MatrixXd joint = log_prior_.transpose().replicate(n, 1);
    for (std::size_t g = 0; g < gaussian_cols_.size(); ++g) {
      const auto col = static_cast<Eigen::Index>(gaussian_cols_[g]);
      for (Eigen::Index k = 0; k < K; ++k) {
        const double mu = mean_(k, static_cast<Eigen::Index>(g));
        const double v = var_(k, static_cast<Eigen::Index>(g));
        const double norm = -0.5 * std::log(2.0 * std::numbers::pi * v);
        joint.col(k).array() += norm - (X.col(col).array() - mu).square() / (2.0 * v);
      }
    }
    for (const auto& group : groups_) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const int s = active_state(X, i, group.columns);
        joint.row(i) += group.log_prob.col(s).transpose();
      }
    }
    softmax_rows(joint);
    for (Eigen::Index k = 0; k < K; ++k) out.col(classes_[static_cast<std::size_t>(k)]) = joint.col(k);
    return out;
  }

  void hash_parameters(HashSink& sink) const override {
    sink.add(log_prior_);
    sink.add(mean_);
    sink.add(var_);
    for (const auto& g : groups_) sink.add(g.log_prob);
  }

 private:
  std::vector<int> classes_;
  int class_count_;
  Eigen::VectorXd log_prior_;
  std::vector<std::size_t> gaussian_cols_;
  Eigen::MatrixXd mean_;
  Eigen::MatrixXd var_;
  std::vector<Group> groups_;
};

}  // namespace

std::shared_ptr<const Estimator> fit_naive_bayes(const std::map<std::string, double>& hp,
                                                 const Eigen::MatrixXd& X, const CategoricalSeries& y,
                                                 const FeatureLayout& layout) {
  const double smoothing = hp.at("var_smoothing");
  const double alpha = hp.at("alpha");
  const bool balanced = hp.at("balanced") != 0.0;

  const auto counts = y.counts();
  std::vector<int> classes;
  std::vector<int> slot(counts.size(), -1);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) {
      slot[c] = static_cast<int>(classes.size());
      classes.push_back(static_cast<int>(c));
    }
  }
  const auto K = static_cast<Eigen::Index>(classes.size());
  const auto n = static_cast<double>(y.size());

  Eigen::VectorXd log_prior(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    log_prior(k) = balanced ? -std::log(static_cast<double>(K))
                            : std::log(static_cast<double>(counts[static_cast<std::size_t>(classes[static_cast<std::size_t>(k)])]) / n);
  }

  std::set<std::size_t> grouped;
  std::vector<Group> groups;
  for (const auto& g : layout.one_hot_groups) {
    bool valid = !g.empty();
    for (auto c : g) valid = valid && c < static_cast<std::size_t>(X.cols()) && !grouped.count(c);
    if (!valid) continue;
    grouped.insert(g.begin(), g.end());
    groups.push_back({g, {}});
  }
  std::vector<std::size_t> gaussian;
  for (std::size_t j = 0; j < static_cast<std::size_t>(X.cols()); ++j) {
    if (!grouped.count(j)) gaussian.push_back(j);
  }

  // per class, per column statistics
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < y.size(); ++i) members[static_cast<std::size_t>(slot[static_cast<std::size_t>(y.codes[i])])].push_back(i);

  const auto G = static_cast<Eigen::Index>(gaussian.size());
  Eigen::MatrixXd mean(K, G);
  Eigen::MatrixXd var(K, G);
  double max_var = 0.0;
  std::vector<double> buffer;
  for (Eigen::Index g = 0; g < G; ++g) {
    const auto col = static_cast<Eigen::Index>(gaussian[static_cast<std::size_t>(g)]);
    buffer.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) buffer[i] = X(static_cast<Eigen::Index>(i), col);
    const double mu_all = stable_sum(buffer) / n;
    for (auto& v : buffer) v = (v - mu_all) * (v - mu_all);
    max_var = std::max(max_var, stable_sum(buffer) / n);
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto& rows = members[static_cast<std::size_t>(k)];
      buffer.resize(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) buffer[r] = X(static_cast<Eigen::Index>(rows[r]), col);
      const double m = stable_sum(buffer) / static_cast<double>(rows.size());
      for (auto& v : buffer) v = (v - m) * (v - m);
      mean(k, g) = m;
      var(k, g) = stable_sum(buffer) / static_cast<double>(rows.size());
    }
  }
  const double epsilon = smoothing * std::max(max_var, 1e-12);
  var.array() += epsilon;

  for (auto& group : groups) {
    const auto states = static_cast<Eigen::Index>(group.columns.size() + 1);
    Eigen::MatrixXd tally = Eigen::MatrixXd::Constant(K, states, alpha);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const int s = active_state(X, static_cast<Eigen::Index>(i), group.columns);
      tally(slot[static_cast<std::size_t>(y.codes[i])], s) += 1.0;
    }
    group.log_prob.resize(K, states);
    for (Eigen::Index k = 0; k < K; ++k) {
      const double total = tally.row(k).sum();
      for (Eigen::Index s = 0; s < states; ++s) {
        // only reachable with alpha = 0: stands in for log(0)
        group.log_prob(k, s) = tally(k, s) > 0.0 ? std::log(tally(k, s) / total) : -1e300;
      }
    }
  }

  return std::make_shared<NaiveBayesEstimator>(std::move(classes), y.category_count(),
                                               std::move(log_prior), std::move(gaussian),
                                               std::move(mean), std::move(var), std::move(groups));
}

}  // namespace gaudit::detail
