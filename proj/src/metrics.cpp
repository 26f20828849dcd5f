#include "gaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaudit/errors.hpp"

namespace gaudit {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double auc(const ScoredPredictions& sp) {
  if (sp.scores.size() != sp.labels.size()) throw DataError("auc: length mismatch");
  double positives = 0.0;
  for (int l : sp.labels) {
    if (l != 0 && l != 1) throw DataError("auc: labels must be 0 or 1");
    positives += l;
  }
  const double negatives = static_cast<double>(sp.labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) throw DataError("auc: both classes must be present");
  const auto ranks = average_ranks(sp.scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (sp.labels[i] == 1) rank_sum += ranks[i];
  }
  const double u = rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

double macro_f1(std::span<const int> pred, std::span<const int> truth, int class_count) {
  if (pred.size() != truth.size()) throw DataError("macro_f1: length mismatch");
  const auto C = static_cast<std::size_t>(class_count);
  std::vector<double> tp(C, 0.0), fp(C, 0.0), fn(C, 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto p = static_cast<std::size_t>(pred[i]);
    const auto t = static_cast<std::size_t>(truth[i]);
    if (p >= C || t >= C) throw DataError("macro_f1: code outside the class set");
    if (p == t) {
      tp[t] += 1.0;
    } else {
      fp[p] += 1.0;
      fn[t] += 1.0;
    }
  }
  double sum = 0.0;
  int used = 0;
  for (std::size_t c = 0; c < C; ++c) {
    if (tp[c] + fn[c] == 0.0 && fp[c] == 0.0) continue;  // never seen
    const double denom = 2.0 * tp[c] + fp[c] + fn[c];
    sum += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
    ++used;
  }
  return used == 0 ? 0.0 : sum / used;
}

double macro_f1(const CategoricalSeries& pred, const CategoricalSeries& truth) {
  return macro_f1(pred.codes, truth.codes, std::max(pred.category_count(), truth.category_count()));
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw DataError("accuracy: length mismatch");
  if (pred.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double accuracy(const CategoricalSeries& pred, const CategoricalSeries& truth) {
  return accuracy(pred.codes, truth.codes);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman: length mismatch");
  if (x.size() < 2) throw DataError("spearman: need at least two points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace gaudit
