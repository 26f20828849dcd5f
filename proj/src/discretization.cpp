#include "gaudit/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gaudit/errors.hpp"

namespace gaudit {

void BinningSpec::validate() const {
  if (edges.size() < 2) throw DataError("binning needs at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw DataError("bin edges must be strictly ascending");
  }
  if (strategy == BinningStrategy::fixed_width && !(width > 0.0)) {
    throw DataError("fixed-width binning needs a positive width");
  }
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DataError("quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

std::vector<double> finite_sorted(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> single_bin(double lo, double hi) {
  if (hi > lo) return {lo, hi};
  return {lo - 0.5, lo + 0.5};
}

std::string bin_name(double lo, double hi, bool closed) {
  std::ostringstream os;
  os.precision(6);
  os << '[' << lo << ", " << hi << (closed ? ']' : ')');
  return os.str();
}

}  // namespace

BinningSpec fd_bins(std::span<const double> values) {
  const auto sorted = finite_sorted(values);
  if (sorted.empty()) throw DataError("cannot bin an empty or all-missing column");

  BinningSpec spec;
  spec.strategy = BinningStrategy::freedman_diaconis;
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  if (sorted.size() < 2 || iqr <= 0.0 || hi <= lo) {
    spec.edges = single_bin(lo, hi);
    return spec;
  }
  const double h = 2.0 * iqr * std::pow(static_cast<double>(sorted.size()), -1.0 / 3.0);
  const double raw = std::ceil((hi - lo) / h);
  const auto bins = static_cast<std::size_t>(std::clamp(raw, 1.0, static_cast<double>(kMaxBins)));
  spec.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    spec.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  }
  spec.edges.back() = hi;
  return spec;
}

BinningSpec fixed_width_bins(std::span<const double> values, double width) {
  if (!(width > 0.0) || !std::isfinite(width)) throw DataError("bin width must be positive");
  const auto sorted = finite_sorted(values);
  if (sorted.empty()) throw DataError("cannot bin an empty or all-missing column");
  const double first = std::floor(sorted.front() / width);
  const double last = std::floor(sorted.back() / width);
  BinningSpec spec;
  spec.strategy = BinningStrategy::fixed_width;
  spec.width = width;
  for (double k = first; k <= last + 1.0; k += 1.0) spec.edges.push_back(k * width);
  return spec;
}

BinningSpec explicit_bins(std::vector<double> edges) {
  BinningSpec spec;
  spec.strategy = BinningStrategy::explicit_edges;
  spec.edges = std::move(edges);
  spec.validate();
  return spec;
}

CategoricalSeries discretize(std::span<const double> values, const BinningSpec& spec) {
  spec.validate();
  const std::size_t bins = spec.bin_count();
  CategoricalSeries raw;
  raw.codes.reserve(values.size());
  const double base = spec.strategy == BinningStrategy::fixed_width
                          ? std::round(spec.edges.front() / spec.width)
                          : 0.0;
  for (double v : values) {
    std::ptrdiff_t bin = 0;
    if (spec.strategy == BinningStrategy::fixed_width) {
      bin = static_cast<std::ptrdiff_t>(std::floor(v / spec.width) - base);
    } else {
      auto it = std::upper_bound(spec.edges.begin(), spec.edges.end(), v);
      bin = std::distance(spec.edges.begin(), it) - 1;
    }
    bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    raw.codes.push_back(static_cast<int>(bin));
  }
  raw.names.reserve(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    raw.names.push_back(bin_name(spec.edges[k], spec.edges[k + 1], k + 1 == bins));
  }
  return densify(raw);
}

CategoricalSeries merge_rare(const CategoricalSeries& series, std::int64_t min_count,
                             std::vector<std::string>* warnings) {
  if (min_count < 1) throw DataError("min_count must be at least 1");
  const auto counts = series.counts();
  const std::size_t categories = counts.size();

  std::vector<std::size_t> survivors;
  std::vector<std::size_t> rare;
  std::int64_t pool = 0;
  for (std::size_t c = 0; c < categories; ++c) {
    if (counts[c] >= min_count) {
      survivors.push_back(c);
    } else {
      rare.push_back(c);
      pool += counts[c];
    }
  }
  if (rare.empty()) return series;

  std::vector<int> remap(categories, -1);
  CategoricalSeries out;
  for (std::size_t c : survivors) {
    remap[c] = static_cast<int>(out.names.size());
    out.names.push_back(series.names[c]);
  }

  std::vector<std::string> pooled_names;
  for (std::size_t c : rare) {
    if (counts[c] > 0) pooled_names.push_back(series.names[c]);
  }

  if (pool > 0) {
    int target = -1;
    if (pool >= min_count || survivors.empty()) {
      target = static_cast<int>(out.names.size());
      out.names.push_back("other");
    } else {
      // smallest survivor; lowest code wins ties
      std::size_t smallest = survivors.front();
      for (std::size_t c : survivors) {
        if (counts[c] < counts[smallest]) smallest = c;
      }
      target = remap[smallest];
    }
    for (std::size_t c : rare) remap[c] = target;
    if (warnings && !pooled_names.empty()) {
      std::string msg = "merged rare categories into '" + out.names[static_cast<std::size_t>(target)] + "':";
      for (const auto& n : pooled_names) msg += " " + n;
      warnings->push_back(msg);
    }
  }

  out.codes.reserve(series.codes.size());
  for (int c : series.codes) out.codes.push_back(remap[static_cast<std::size_t>(c)]);
  if (out.names.empty()) out.names.push_back("(empty)");
  if (warnings && out.names.size() == 1 && !series.codes.empty()) {
    warnings->push_back("only one category remains after merging rare values; attribute is degenerate");
  }
  return out;
}

}  // namespace gaudit
