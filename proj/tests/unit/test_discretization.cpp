#include <doctest.h>

#include <random>
#include <set>

#include "gaudit/discretization.hpp"
#include "gaudit/errors.hpp"
#include "support.hpp"

using namespace gaudit;

namespace {

CategoricalSeries series_from_counts(const std::vector<std::pair<std::string, int>>& counts) {
  CategoricalSeries s;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    s.names.push_back(counts[k].first);
    s.codes.insert(s.codes.end(), counts[k].second, static_cast<int>(k));
  }
  return s;
}

// Freedman-Diaconis bin count evaluated from scratch.
std::size_t fd_count_oracle(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  const double h = 2.0 * (q(0.75) - q(0.25)) * std::pow(static_cast<double>(v.size()), -1.0 / 3.0);
  return static_cast<std::size_t>(std::ceil((v.back() - v.front()) / h));
}

}  // namespace

TEST_SUITE("discretization") {

TEST_CASE("quantiles interpolate linearly between order statistics") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(quantile_sorted(v, 0.25) == doctest::Approx(2.75));
  CHECK(quantile_sorted(v, 0.75) == doctest::Approx(6.25));
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 8.0);
}

TEST_CASE("values 1..8 give two bins of width 3.5") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8};
  const BinningSpec spec = fd_bins(v);
  REQUIRE(spec.bin_count() == 2);
  CHECK(spec.edges[0] == 1.0);
  CHECK(spec.edges[1] == doctest::Approx(4.5));
  CHECK(spec.edges[2] == 8.0);
}

TEST_CASE("constant input gives one bin") {
  const std::vector<double> v = {5, 5, 5, 5};
  CHECK(fd_bins(v).bin_count() == 1);
  const auto codes = discretize(v, fd_bins(v));
  CHECK(codes.category_count() == 1);
}

TEST_CASE("standard normal sample bin count matches the rule") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(10000);
    for (auto& x : v) x = g(rng);
    const std::size_t bins = fd_bins(v).bin_count();
    CHECK(bins == fd_count_oracle(v));
    // h is about 2 * 1.35 / 21.5 = 0.125 and the range of 10k normals is
    // about 7.5 to 8.5, so the rule lands in the low-to-mid sixties
    CHECK(bins >= 50);
    CHECK(bins <= 75);
  }
}

TEST_CASE("fixed-width age bins") {
  SUBCASE("sparse ages become dense codes") {
    const std::vector<double> ages = {3, 7, 41, 89};
    const auto s = discretize(ages, fixed_width_bins(ages, 5));
    CHECK(s.codes == std::vector<int>{0, 1, 2, 3});
    CHECK(s.category_count() == 4);
  }
  SUBCASE("ages 0..89 give 18 classes") {
    std::vector<double> ages;
    for (int a = 0; a < 90; ++a) ages.push_back(a);
    CHECK(discretize(ages, fixed_width_bins(ages, 5)).category_count() == 18);
  }
  SUBCASE("single value") {
    const std::vector<double> ages = {12};
    CHECK(discretize(ages, fixed_width_bins(ages, 5)).category_count() == 1);
  }
  SUBCASE("non-positive width") {
    const std::vector<double> ages = {12};
    CHECK_THROWS(fixed_width_bins(ages, 0.0));
  }
}

TEST_CASE("discretize with explicit edges") {
  const BinningSpec spec = explicit_bins({0.0, 0.5, 1.0});
  const std::vector<double> v = {0.1, 0.9};
  CHECK(discretize(v, spec).codes == std::vector<int>{0, 1});
  const std::vector<double> w = {0.1, 0.9, 2.0};
  CHECK(discretize(w, spec).codes[2] == 1);
  CHECK_THROWS_AS(explicit_bins({1.0, 0.5}), DataError);
  CHECK_THROWS_AS(explicit_bins({1.0}), DataError);
}

TEST_CASE("normal sample codes are dense") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(5000);
  for (auto& x : v) x = g(rng);
  const auto s = discretize(v, fd_bins(v));
  std::set<int> seen(s.codes.begin(), s.codes.end());
  CHECK(static_cast<int>(seen.size()) == s.category_count());
  CHECK(*seen.rbegin() == s.category_count() - 1);
}

TEST_CASE("monotone transforms with transformed edges keep the codes") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> v(1000);
  for (auto& x : v) x = u(rng);
  const std::vector<double> edges = {0, 1, 2.5, 4, 7, 10};
  auto f = [](double x) { return std::exp(0.3 * x) + x * x * x; };
  std::vector<double> fv;
  std::vector<double> fe;
  for (double x : v) fv.push_back(f(x));
  for (double e : edges) fe.push_back(f(e));
  CHECK(discretize(v, explicit_bins(edges)).codes == discretize(fv, explicit_bins(fe)).codes);
}

TEST_CASE("merge_rare examples") {
  SUBCASE("pooled remainder too small collapses to one category") {
    std::vector<std::string> warnings;
    const auto s = merge_rare(series_from_counts({{"a", 500}, {"b", 80}, {"c", 15}}), 100, &warnings);
    CHECK(s.category_count() == 1);
    CHECK(s.counts()[0] == 595);
    CHECK_FALSE(warnings.empty());
  }
  SUBCASE("all categories large enough") {
    const auto in = series_from_counts({{"a", 500}, {"b", 300}});
    const auto s = merge_rare(in, 100);
    CHECK(s.names == in.names);
    CHECK(s.codes == in.codes);
  }
  SUBCASE("small groups pool into other") {
    const auto s = merge_rare(
        series_from_counts({{"White", 400}, {"Black", 200}, {"Guatemalan", 60}, {"Honduran", 50}}), 100);
    CHECK(s.category_count() == 3);
    CHECK(std::find(s.names.begin(), s.names.end(), "Guatemalan") == s.names.end());
    CHECK(std::find(s.names.begin(), s.names.end(), "Honduran") == s.names.end());
    CHECK(std::find(s.names.begin(), s.names.end(), "other") != s.names.end());
  }
}

TEST_CASE("merge_rare properties on random count vectors") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int C = std::uniform_int_distribution<int>(1, 9)(rng);
    std::vector<std::pair<std::string, int>> counts;
    for (int c = 0; c < C; ++c) {
      counts.push_back({"c" + std::to_string(c), std::uniform_int_distribution<int>(1, 300)(rng)});
    }
    const std::int64_t min_count = std::uniform_int_distribution<int>(1, 150)(rng);
    const auto in = series_from_counts(counts);
    const auto out = merge_rare(in, min_count);
    CHECK(out.size() == in.size());
    CHECK(out.category_count() <= in.category_count());
    if (out.category_count() > 1) {
      const auto c = out.counts();
      CHECK(*std::min_element(c.begin(), c.end()) >= min_count);
    }
    out.validate();
  }
}

}  // TEST_SUITE
