#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gaudit/dataset.hpp"

namespace gaudit {

/// Joint count matrix of two categorical variables (rows x cols).
class ContingencyTable {
 public:
  ContingencyTable(std::size_t rows, std::size_t cols);
  /// Throws DataError on ragged rows or negative counts.
  static ContingencyTable from_counts(const std::vector<std::vector<std::int64_t>>& counts);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::int64_t operator()(std::size_t r, std::size_t c) const { return counts_[r * cols_ + c]; }
  void add(std::size_t r, std::size_t c, std::int64_t n = 1) { counts_[r * cols_ + c] += n; }

  std::vector<std::int64_t> row_marginals() const;
  std::vector<std::int64_t> col_marginals() const;
  std::int64_t total() const;
  ContingencyTable transpose() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::int64_t> counts_;
};

/// counts[i][j] = #{k : x_k = i and y_k = j}. Throws DataError on length mismatch.
ContingencyTable contingency(const CategoricalSeries& x, const CategoricalSeries& y);
ContingencyTable contingency(std::span<const int> x, int x_categories, std::span<const int> y,
                             int y_categories);

/// Shannon entropy in nats of a count vector. Throws on an all-zero vector.
double entropy(std::span<const std::int64_t> counts);
/// Plug-in mutual information in nats.
double mutual_information(const ContingencyTable& t);
/// Expected MI under the hypergeometric (fixed-marginal permutation) model.
double expected_mi(std::span<const std::int64_t> a, std::span<const std::int64_t> b, std::int64_t n);

enum class AmiNormalization { max, arithmetic };

struct AmiScore {
  double mi = 0.0;
  double emi = 0.0;
  double h_row = 0.0;
  double h_col = 0.0;
  double ami = 0.0;
};

/// (MI - EMI) / (norm(H_row, H_col) - EMI); 0 when the denominator is not positive.
AmiScore adjusted_mi(const ContingencyTable& t, AmiNormalization norm = AmiNormalization::max);

}  // namespace gaudit
