#include "gaudit/infotheory.hpp"

#include <algorithm>
#include <cmath>

#include "gaudit/errors.hpp"

namespace gaudit {

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), counts_(rows * cols, 0) {}

ContingencyTable ContingencyTable::from_counts(const std::vector<std::vector<std::int64_t>>& counts) {
  if (counts.empty() || counts.front().empty()) throw DataError("empty contingency table");
  ContingencyTable t(counts.size(), counts.front().size());
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r].size() != t.cols_) throw DataError("ragged contingency table");
    for (std::size_t c = 0; c < t.cols_; ++c) {
      if (counts[r][c] < 0) throw DataError("negative count in contingency table");
      t.counts_[r * t.cols_ + c] = counts[r][c];
    }
  }
  return t;
}

std::vector<std::int64_t> ContingencyTable::row_marginals() const {
  std::vector<std::int64_t> out(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out[r] += counts_[r * cols_ + c];
  }
  return out;
}

std::vector<std::int64_t> ContingencyTable::col_marginals() const {
  std::vector<std::int64_t> out(cols_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out[c] += counts_[r * cols_ + c];
  }
  return out;
}

std::int64_t ContingencyTable::total() const {
  std::int64_t n = 0;
  for (auto v : counts_) n += v;
  return n;
}

ContingencyTable ContingencyTable::transpose() const {
  ContingencyTable t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t.counts_[c * rows_ + r] = counts_[r * cols_ + c];
  }
  return t;
}

ContingencyTable contingency(std::span<const int> x, int x_categories, std::span<const int> y,
                             int y_categories) {
  if (x.size() != y.size()) {
    throw DataError("contingency: length mismatch (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  }
  ContingencyTable t(static_cast<std::size_t>(x_categories), static_cast<std::size_t>(y_categories));
  for (std::size_t k = 0; k < x.size(); ++k) {
    t.add(static_cast<std::size_t>(x[k]), static_cast<std::size_t>(y[k]));
  }
  return t;
}

ContingencyTable contingency(const CategoricalSeries& x, const CategoricalSeries& y) {
  return contingency(x.codes, x.category_count(), y.codes, y.category_count());
}

double entropy(std::span<const std::int64_t> counts) {
  std::int64_t n = 0;
  for (auto c : counts) {
    if (c < 0) throw DataError("entropy: negative count");
    n += c;
  }
  if (n == 0) throw DataError("entropy: all counts are zero");
  const double total = static_cast<double>(n);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double mutual_information(const ContingencyTable& t) {
  const auto a = t.row_marginals();
  const auto b = t.col_marginals();
  const double n = static_cast<double>(t.total());
  if (n <= 0.0) return 0.0;
  const double log_n = std::log(n);
  double mi = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const auto nij = t(i, j);
      if (nij == 0) continue;
      const double v = static_cast<double>(nij);
      mi += (v / n) * (log_n + std::log(v) - std::log(static_cast<double>(a[i])) -
                       std::log(static_cast<double>(b[j])));
    }
  }
  return std::max(mi, 0.0);
}

namespace {

// ln(k!) for k in [0, n], grown on demand per thread.
const std::vector<double>& log_factorials(std::int64_t n) {
  thread_local std::vector<double> table{0.0};
  if (static_cast<std::int64_t>(table.size()) <= n) {
    const auto old = static_cast<std::int64_t>(table.size());
    table.resize(static_cast<std::size_t>(n + 1));
    for (std::int64_t k = old; k <= n; ++k) {
      table[static_cast<std::size_t>(k)] = std::lgamma(static_cast<double>(k) + 1.0);
    }
  }
  return table;
}

// Cells of the hypergeometric pmf below this are skipped once we walk away
// from the mode; the pmf is unimodal so everything beyond is smaller still.
constexpr double kPmfCutoff = 1e-22;

}  // namespace

double expected_mi(std::span<const std::int64_t> a, std::span<const std::int64_t> b, std::int64_t n) {
  std::int64_t sa = 0;
  std::int64_t sb = 0;
  for (auto v : a) {
    if (v < 0) throw DataError("expected_mi: negative marginal");
    sa += v;
  }
  for (auto v : b) {
    if (v < 0) throw DataError("expected_mi: negative marginal");
    sb += v;
  }
  if (sa != n || sb != n) {
    throw DataError("expected_mi: inconsistent marginals (sum a = " + std::to_string(sa) +
                    ", sum b = " + std::to_string(sb) + ", N = " + std::to_string(n) + ")");
  }
  if (n <= 1) return 0.0;

  const auto& lf = log_factorials(n);
  const double N = static_cast<double>(n);
  const double log_n = std::log(N);
  auto LF = [&](std::int64_t k) { return lf[static_cast<std::size_t>(k)]; };

  double emi = 0.0;
  for (auto ai : a) {
    if (ai == 0) continue;
    for (auto bj : b) {
      if (bj == 0) continue;
      const std::int64_t lo = std::max<std::int64_t>(1, ai + bj - n);
      const std::int64_t hi = std::min(ai, bj);
      if (lo > hi) continue;
      const double log_ab = std::log(static_cast<double>(ai)) + std::log(static_cast<double>(bj));
      const double fixed = LF(ai) + LF(bj) + LF(n - ai) + LF(n - bj) - LF(n);
      auto log_pmf = [&](std::int64_t k) {
        return fixed - LF(k) - LF(ai - k) - LF(bj - k) - LF(n - ai - bj + k);
      };
      auto term = [&](std::int64_t k, double p) {
        const double v = static_cast<double>(k);
        return (v / N) * (log_n + std::log(v) - log_ab) * p;
      };

      const std::int64_t mode = std::clamp<std::int64_t>((ai + 1) * (bj + 1) / (n + 2), lo, hi);
      const double p_mode = std::exp(log_pmf(mode));
      double cell = term(mode, p_mode);

      double p = p_mode;
      for (std::int64_t k = mode + 1; k <= hi; ++k) {
        // P(k) / P(k-1)
        p *= static_cast<double>((ai - k + 1) * (bj - k + 1)) /
             (static_cast<double>(k) * static_cast<double>(n - ai - bj + k));
        if (p < kPmfCutoff) break;
        cell += term(k, p);
      }
      p = p_mode;
      for (std::int64_t k = mode - 1; k >= lo; --k) {
        // P(k) / P(k+1)
        p *= (static_cast<double>(k + 1) * static_cast<double>(n - ai - bj + k + 1)) /
             static_cast<double>((ai - k) * (bj - k));
        if (p < kPmfCutoff) break;
        cell += term(k, p);
      }
      emi += cell;
    }
  }
  return std::max(emi, 0.0);
}

AmiScore adjusted_mi(const ContingencyTable& t, AmiNormalization norm) {
  AmiScore s;
  const auto a = t.row_marginals();
  const auto b = t.col_marginals();
  const auto n = t.total();
  if (n <= 0) throw DataError("adjusted_mi: empty table");
  s.h_row = entropy(a);
  s.h_col = entropy(b);
  s.mi = mutual_information(t);
  s.emi = expected_mi(a, b, n);
  const double scale =
      norm == AmiNormalization::max ? std::max(s.h_row, s.h_col) : 0.5 * (s.h_row + s.h_col);
  const double denom = scale - s.emi;
  // Rounding can leave a tiny positive denominator when both sides are
  // single-category (H = EMI = 0); treat that as undefined too.
  s.ami = denom > 1e-15 ? (s.mi - s.emi) / denom : 0.0;
  return s;
}

}  // namespace gaudit
