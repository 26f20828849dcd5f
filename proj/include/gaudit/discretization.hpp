#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaudit/dataset.hpp"

namespace gaudit {

enum class BinningStrategy { freedman_diaconis, fixed_width, explicit_edges };

struct BinningSpec {
  BinningStrategy strategy = BinningStrategy::explicit_edges;
  double width = 0.0;          // fixed_width only
  std::vector<double> edges;   // ascending; bins are [e_k, e_{k+1}), last bin closed

  std::size_t bin_count() const { return edges.size() < 2 ? 0 : edges.size() - 1; }
  /// Throws DataError unless edges are strictly ascending with at least two entries.
  void validate() const;
};

inline constexpr std::size_t kMaxBins = 512;
inline constexpr std::int64_t kDefaultMinCount = 100;

/// Linear interpolation between order statistics of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double q);

/// Freedman-Diaconis: width 2*IQR*n^(-1/3), ceil(range/width) equal bins over
/// [min, max], clamped to [1, kMaxBins]. Non-finite values are ignored.
BinningSpec fd_bins(std::span<const double> values);
/// Bins of the form [k*width, (k+1)*width) covering the finite values.
BinningSpec fixed_width_bins(std::span<const double> values, double width);
BinningSpec explicit_bins(std::vector<double> edges);

/// Maps values to bins (out-of-range values clamp to the end bins), then drops
/// empty bins so codes are dense.
CategoricalSeries discretize(std::span<const double> values, const BinningSpec& spec);

/// Pools categories with fewer than `min_count` members into "other". A pool
/// that is itself too small joins the smallest surviving category. Messages
/// about degenerate results are appended to `warnings` when given.
CategoricalSeries merge_rare(const CategoricalSeries& series, std::int64_t min_count,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace gaudit
