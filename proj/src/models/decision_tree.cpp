// CART classification tree with (optionally class-weighted) Gini impurity.

#include <algorithm>
#include <numeric>

#include "gaudit/models.hpp"

namespace gaudit::detail {

namespace {

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Eigen::VectorXd distribution;
};

class TreeEstimator final : public Estimator {
 public:
  TreeEstimator(std::vector<Node> nodes, int class_count)
      : nodes_(std::move(nodes)), class_count_(class_count) {}

  Eigen::MatrixXd proba(const Eigen::MatrixXd& X) const override {
    Eigen::MatrixXd out(X.rows(), class_count_);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      int at = 0;
      while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
        const Node& n = nodes_[static_cast<std::size_t>(at)];
        at = X(i, n.feature) <= n.threshold ? n.left : n.right;
      }
      out.row(i) = nodes_[static_cast<std::size_t>(at)].distribution.transpose();
    }
    return out;
  }

  void hash_parameters(HashSink& sink) const override {
    for (const auto& n : nodes_) {
      sink.add(static_cast<std::int64_t>(n.feature));
      sink.add(n.threshold);
      sink.add(static_cast<std::int64_t>(n.left));
      sink.add(static_cast<std::int64_t>(n.right));
      if (n.feature < 0) sink.add(n.distribution);
    }
  }

 private:
  std::vector<Node> nodes_;
  int class_count_;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& X, const CategoricalSeries& y, int max_depth,
              std::size_t min_leaf, bool balanced)
      : X_(X), y_(y.codes), classes_(y.category_count()), max_depth_(max_depth), min_leaf_(min_leaf) {
    const auto counts = y.counts();
    const auto present = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    weight_.assign(counts.size(), 1.0);
    if (balanced) {
      for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) {
          weight_[c] = static_cast<double>(y.size()) /
                       (static_cast<double>(present) * static_cast<double>(counts[c]));
        }
      }
    }
  }

  std::vector<Node> build() {
    std::vector<std::size_t> rows(y_.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  // Weighted "purity" sum_c W_c^2 / W; larger is better.
  double purity(const std::vector<std::int64_t>& counts) const {
    double total = 0.0;
    double squares = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      const double wc = static_cast<double>(counts[c]) * weight_[c];
      total += wc;
      squares += wc * wc;
    }
    return total > 0.0 ? squares / total : 0.0;
  }

  int grow(const std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    std::vector<std::int64_t> counts(static_cast<std::size_t>(classes_), 0);
    for (auto r : rows) ++counts[static_cast<std::size_t>(y_[r])];
    {
      Eigen::VectorXd dist(classes_);
      for (int c = 0; c < classes_; ++c) dist(c) = static_cast<double>(counts[static_cast<std::size_t>(c)]) * weight_[static_cast<std::size_t>(c)];
      dist /= dist.sum();
      nodes_[static_cast<std::size_t>(id)].distribution = std::move(dist);
    }

    const auto nonzero = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    if (depth >= max_depth_ || nonzero <= 1 || rows.size() < 2 * min_leaf_) return id;

    const double parent = purity(counts);
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> column(rows.size());
    std::vector<std::int64_t> left(static_cast<std::size_t>(classes_));
    std::vector<std::int64_t> right(static_cast<std::size_t>(classes_));
    for (Eigen::Index f = 0; f < X_.cols(); ++f) {
      for (std::size_t k = 0; k < rows.size(); ++k) {
        column[k] = {X_(static_cast<Eigen::Index>(rows[k]), f), y_[rows[k]]};
      }
      // (value, class) ordering makes the scan independent of row order
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;

      std::fill(left.begin(), left.end(), 0);
      right = counts;
      double lw = 0.0, lsq = 0.0, rw = 0.0, rsq = 0.0;
      for (std::size_t c = 0; c < counts.size(); ++c) {
        const double wc = static_cast<double>(counts[c]) * weight_[c];
        rw += wc;
        rsq += wc * wc;
      }
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        const auto c = static_cast<std::size_t>(column[k].second);
        const double w = weight_[c];
        // move one sample of class c from right to left
        lsq += w * w * static_cast<double>(2 * left[c] + 1);
        rsq -= w * w * static_cast<double>(2 * right[c] - 1);
        ++left[c];
        --right[c];
        lw += w;
        rw -= w;
        const std::size_t n_left = k + 1;
        if (n_left < min_leaf_) continue;
        if (column.size() - n_left < min_leaf_) break;
        if (column[k].first == column[k + 1].first) continue;
        const double gain = lsq / lw + rsq / rw - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (column[k].first + column[k + 1].first);
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> lrows;
    std::vector<std::size_t> rrows;
    for (auto r : rows) {
      (X_(static_cast<Eigen::Index>(r), best_feature) <= best_threshold ? lrows : rrows).push_back(r);
    }
    const int l = grow(lrows, depth + 1);
    const int r = grow(rrows, depth + 1);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const Eigen::MatrixXd& X_;
  const std::vector<int>& y_;
  int classes_;
  int max_depth_;
  std::size_t min_leaf_;
  std::vector<double> weight_;
  std::vector<Node> nodes_;
};

}  // namespace

std::shared_ptr<const Estimator> fit_tree(const std::map<std::string, double>& hp,
                                          const Eigen::MatrixXd& X, const CategoricalSeries& y) {
  TreeBuilder builder(X, y, static_cast<int>(hp.at("max_depth")),
                      static_cast<std::size_t>(hp.at("min_leaf")), hp.at("balanced") != 0.0);
  return std::make_shared<TreeEstimator>(builder.build(), y.category_count());
}

}  // namespace gaudit::detail
