#include <doctest.h>

#include <random>

#include "gaudit/errors.hpp"
#include "gaudit/metrics.hpp"
#include "gaudit/models.hpp"
#include "support.hpp"

using namespace gaudit;

namespace {

CategoricalSeries labels(const std::vector<int>& codes, int classes) {
  CategoricalSeries s;
  s.codes = codes;
  for (int c = 0; c < classes; ++c) s.names.push_back(std::to_string(c));
  return s;
}

PredictorSpec spec_of(ModelFamily f, std::map<std::string, double> hp = {}, std::uint64_t seed = 7) {
  return PredictorSpec{f, std::move(hp), seed};
}

// Two Gaussian blobs with a clear margin in 2D.
std::pair<Eigen::MatrixXd, CategoricalSeries> separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    const double c = y[i] == 1 ? 2.0 : -2.0;
    X(static_cast<Eigen::Index>(i), 0) = c + g(rng);
    X(static_cast<Eigen::Index>(i), 1) = -c + g(rng);
  }
  return {X, labels(y, 2)};
}

std::pair<Eigen::MatrixXd, CategoricalSeries> random_problem(std::size_t n, int d, int classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % static_cast<std::size_t>(classes));
    for (int j = 0; j < d; ++j) X(static_cast<Eigen::Index>(i), j) = g(rng) + (j == 0 ? y[i] : 0.0);
  }
  return {X, labels(y, classes)};
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("logistic regression separates separable data") {
  const auto [X, y] = separable(200, 1);
  const auto m = fit(spec_of(ModelFamily::logistic_regression), X, y);
  CHECK(accuracy(predict(m, X), y) == 1.0);
}

TEST_CASE("decision tree memorizes eight distinct rows") {
  Eigen::MatrixXd X(8, 3);
  std::vector<int> y(8);
  for (int i = 0; i < 8; ++i) {
    X(i, 0) = i & 1;
    X(i, 1) = (i >> 1) & 1;
    X(i, 2) = (i >> 2) & 1;
    y[static_cast<std::size_t>(i)] = (i * 5 + 3) % 3;
  }
  const auto m = fit(spec_of(ModelFamily::decision_tree, {{"min_leaf", 1}, {"max_depth", 64}}), X, labels(y, 3));
  CHECK(accuracy(predict(m, X), labels(y, 3)) == 1.0);
}

TEST_CASE("naive bayes with a class-pure feature") {
  Eigen::MatrixXd X(60, 2);
  std::vector<int> y(60);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    y[static_cast<std::size_t>(i)] = i % 3;
    X(i, 0) = 10.0 * (i % 3) + 0.1 * g(rng);
    X(i, 1) = g(rng);
  }
  const auto m = fit(spec_of(ModelFamily::naive_bayes), X, labels(y, 3));
  CHECK(accuracy(predict(m, X), labels(y, 3)) == 1.0);
}

TEST_CASE("single-class training") {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 3);
  const auto y = labels(std::vector<int>(10, 0), 1);
  for (auto f : kAllFamilies) {
    const auto m = fit(spec_of(f), X, y);
    const auto p = predict(m, X);
    CHECK(std::all_of(p.codes.begin(), p.codes.end(), [](int c) { return c == 0; }));
    if (f == ModelFamily::naive_bayes) CHECK(predict_proba(m, X).isOnes());
  }
}

TEST_CASE("ties go to the lowest class code") {
  const auto m = make_linear_model(Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1));
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(4, 2);
  const Eigen::MatrixXd p = predict_proba(m, X);
  CHECK(p.isConstant(0.5));
  const auto codes = predict(m, X).codes;
  CHECK(codes == std::vector<int>(4, 0));
}

TEST_CASE("linear model scores by hand") {
  Eigen::MatrixXd w(1, 2);
  w << 1.0, -1.0;
  const auto m = make_linear_model(w, Eigen::VectorXd::Zero(1));
  Eigen::MatrixXd X(2, 2);
  X << 2, 0, 0, 2;
  CHECK(predict(m, X).codes == std::vector<int>{1, 0});
  const Eigen::MatrixXd p = predict_proba(m, X);
  CHECK(p(0, 1) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-12));
}

TEST_CASE("mlp with zero output weights is uniform") {
  MlpWeights w;
  w.hidden.weight = Eigen::MatrixXd::Random(5, 3);
  w.hidden.bias = Eigen::VectorXd::Random(5);
  w.output.weight = Eigen::MatrixXd::Zero(4, 5);
  w.output.bias = Eigen::VectorXd::Zero(4);
  const auto m = make_mlp(w);
  const Eigen::MatrixXd p = predict_proba(m, Eigen::MatrixXd::Random(6, 3));
  CHECK(p.isConstant(0.25, 1e-15));
}

TEST_CASE("representation shape, determinism and recomposition") {
  const auto [X, y] = random_problem(5, 4, 2, 3);
  const auto m = fit(spec_of(ModelFamily::mlp, {{"hidden", 16}}), X, y);
  const Eigen::MatrixXd h = representation(m, X);
  CHECK(h.rows() == 5);
  CHECK(h.cols() == 16);

  Eigen::MatrixXd twin(2, 4);
  twin.row(0) = X.row(1);
  twin.row(1) = X.row(1);
  const Eigen::MatrixXd ht = representation(m, twin);
  CHECK(ht.row(0) == ht.row(1));

  const auto& out = m.final_layer();
  Eigen::MatrixXd scores = (h * out.weight.transpose()).rowwise() + out.bias.transpose();
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    scores.row(i) = (scores.row(i).array() - mx).exp().matrix();
    scores.row(i) /= scores.row(i).sum();
  }
  CHECK((scores - predict_proba(m, X)).cwiseAbs().maxCoeff() < 1e-9);

  const auto lr = fit(spec_of(ModelFamily::logistic_regression), X, y);
  CHECK_THROWS_AS(representation(lr, X), ModelError);
}

TEST_CASE("fits are deterministic for every family") {
  const auto [X, y] = random_problem(150, 4, 3, 9);
  for (auto f : kAllFamilies) {
    const auto a = fit(spec_of(f), X, y);
    const auto b = fit(spec_of(f), X, y);
    CHECK(predict_proba(a, X) == predict_proba(b, X));
    CHECK(a.parameter_hash() == b.parameter_hash());
  }
}

TEST_CASE("tree and naive bayes ignore training row order") {
  const auto [X, y] = random_problem(200, 3, 3, 13);
  std::vector<std::size_t> order(200);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(4);
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::MatrixXd Xp(200, 3);
  std::vector<int> yp(200);
  for (std::size_t i = 0; i < 200; ++i) {
    Xp.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(order[i]));
    yp[i] = y.codes[order[i]];
  }
  const auto tree_a = fit(spec_of(ModelFamily::decision_tree), X, y);
  const auto tree_b = fit(spec_of(ModelFamily::decision_tree), Xp, labels(yp, 3));
  CHECK(predict_proba(tree_a, X) == predict_proba(tree_b, X));
  const auto nb_a = fit(spec_of(ModelFamily::naive_bayes), X, y);
  const auto nb_b = fit(spec_of(ModelFamily::naive_bayes), Xp, labels(yp, 3));
  CHECK((predict_proba(nb_a, X) - predict_proba(nb_b, X)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(predict(nb_a, X).codes == predict(nb_b, X).codes);
}

TEST_CASE("probabilities are row-stochastic for every family") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const int classes = std::uniform_int_distribution<int>(2, 5)(rng);
    const auto [X, y] = random_problem(120, 3, classes, rng());
    const Eigen::MatrixXd probe = Eigen::MatrixXd::Random(50, 3) * 5.0;
    for (auto f : kAllFamilies) {
      const Eigen::MatrixXd p = predict_proba(fit(spec_of(f), X, y), probe);
      CHECK(p.cols() == classes);
      CHECK(p.minCoeff() >= 0.0);
      CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("absent classes get a zero-mass column") {
  const auto [X, y2] = random_problem(60, 2, 2, 5);
  const auto y = labels(y2.codes, 3);  // class 2 never occurs
  for (auto f : kAllFamilies) {
    const Eigen::MatrixXd p = predict_proba(fit(spec_of(f), X, y), X);
    CHECK(p.cols() == 3);
    CHECK(p.col(2).isZero());
  }
}

TEST_CASE("mlp gradients match central differences") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 10;
  const int d = 4;
  const int h = 6;
  const int c = 3;
  MlpWeights w;
  auto fill = [&](Eigen::MatrixXd& m, Eigen::Index r, Eigen::Index k) {
    m.resize(r, k);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 0.5 * g(rng);
  };
  auto fillv = [&](Eigen::VectorXd& v, Eigen::Index r) {
    v.resize(r);
    for (Eigen::Index i = 0; i < r; ++i) v[i] = 0.5 * g(rng);
  };
  fill(w.hidden.weight, h, d);
  fillv(w.hidden.bias, h);
  fill(w.output.weight, c, h);
  fillv(w.output.bias, c);
  Eigen::MatrixXd X;
  fill(X, n, d);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, c);
  for (int i = 0; i < n; ++i) T(i, i % c) = 1.0;
  Eigen::VectorXd sw(n);
  for (int i = 0; i < n; ++i) sw[i] = 0.5 + 0.1 * i;

  MlpWeights grad;
  detail::mlp_loss(w, X, T, sw, &grad);

  const double eps = 1e-6;
  double worst = 0.0;
  auto probe = [&](double& param, double analytic) {
    const double keep = param;
    param = keep + eps;
    const double up = detail::mlp_loss(w, X, T, sw, nullptr);
    param = keep - eps;
    const double down = detail::mlp_loss(w, X, T, sw, nullptr);
    param = keep;
    const double numeric = (up - down) / (2 * eps);
    const double rel = std::abs(numeric - analytic) / std::max(1e-8, std::abs(numeric) + std::abs(analytic));
    worst = std::max(worst, rel);
  };
  for (Eigen::Index i = 0; i < w.hidden.weight.size(); ++i) probe(w.hidden.weight.data()[i], grad.hidden.weight.data()[i]);
  for (Eigen::Index i = 0; i < w.hidden.bias.size(); ++i) probe(w.hidden.bias[i], grad.hidden.bias[i]);
  for (Eigen::Index i = 0; i < w.output.weight.size(); ++i) probe(w.output.weight.data()[i], grad.output.weight.data()[i]);
  for (Eigen::Index i = 0; i < w.output.bias.size(); ++i) probe(w.output.bias[i], grad.output.bias[i]);
  CHECK(worst < 1e-4);
}

TEST_CASE("input validation") {
  const auto [X, y] = random_problem(10, 2, 2, 1);
  SUBCASE("more classes than rows") {
    CHECK_THROWS_AS(fit(spec_of(ModelFamily::naive_bayes), X.topRows(2), labels({0, 1}, 3)), ModelError);
  }
  SUBCASE("non-finite features") {
    Eigen::MatrixXd bad = X;
    bad(3, 1) = std::nan("");
    CHECK_THROWS_AS(fit(spec_of(ModelFamily::logistic_regression), bad, y), ModelError);
  }
  SUBCASE("dimension mismatch on predict") {
    const auto m = fit(spec_of(ModelFamily::decision_tree), X, y);
    CHECK_THROWS_AS(predict(m, Eigen::MatrixXd::Zero(3, 5)), ModelError);
  }
  SUBCASE("unknown hyperparameter") {
    CHECK_THROWS_AS(fit(spec_of(ModelFamily::mlp, {{"depth", 3}}), X, y), ModelError);
  }
  SUBCASE("unknown family") {
    CHECK_THROWS_AS(parse_family("random_forest"), ModelError);
  }
}

}  // TEST_SUITE
