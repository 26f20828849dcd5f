#pragma once

// Brute-force reference implementations and small helpers shared by the unit
// and acceptance tests. Everything here is written directly from definitions
// and deliberately avoids calling into the library under test.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace oracle {

// MI in nats of two label vectors, straight from p(x,y) log p(x,y)/(p(x)p(y)).
inline double mi_of_labels(const std::vector<int>& x, const std::vector<int>& y) {
  const double n = static_cast<double>(x.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> px;
  std::map<int, double> py;
  for (std::size_t i = 0; i < x.size(); ++i) {
    joint[{x[i], y[i]}] += 1.0;
    px[x[i]] += 1.0;
    py[y[i]] += 1.0;
  }
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    mi += (c / n) * std::log(c * n / (px[key.first] * py[key.second]));
  }
  return mi;
}

inline double entropy_of_labels(const std::vector<int>& x) {
  std::map<int, double> c;
  for (int v : x) c[v] += 1.0;
  double h = 0.0;
  for (const auto& [k, v] : c) {
    const double p = v / static_cast<double>(x.size());
    h -= p * std::log(p);
  }
  return h;
}

// Labels realizing the given marginal counts, in sorted order.
inline std::vector<int> labels_from_counts(const std::vector<int>& counts) {
  std::vector<int> out;
  for (std::size_t k = 0; k < counts.size(); ++k) out.insert(out.end(), counts[k], static_cast<int>(k));
  return out;
}

// Mean MI over every distinct arrangement of the b-labels against fixed
// a-labels. Distinct multiset permutations are equally likely under a uniform
// random permutation, so this is the exact permutation expectation.
inline double brute_force_emi(const std::vector<int>& a_counts, const std::vector<int>& b_counts) {
  const std::vector<int> x = labels_from_counts(a_counts);
  std::vector<int> y = labels_from_counts(b_counts);
  double total = 0.0;
  std::size_t count = 0;
  do {
    total += mi_of_labels(x, y);
    ++count;
  } while (std::next_permutation(y.begin(), y.end()));
  return total / static_cast<double>(count);
}

// All integer partitions of n (descending parts).
inline void partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  partitions(n, n, cur, out);
  return out;
}

// AUC by counting every (positive, negative) pair.
inline double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Macro-F1 over classes that appear in truth or prediction.
inline double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::vector<int> classes;
  for (int v : pred) classes.push_back(v);
  for (int v : truth) classes.push_back(v);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  double sum = 0.0;
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == c && truth[i] == c) tp += 1;
      else if (pred[i] == c) fp += 1;
      else if (truth[i] == c) fn += 1;
    }
    sum += tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
  }
  return sum / static_cast<double>(classes.size());
}

// Spearman via the textbook 1 - 6 sum d^2 / (n (n^2 - 1)); valid without ties.
inline double spearman_no_ties(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[idx[k]] = static_cast<double>(k + 1);
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
}

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1 - p) * std::log(1 - p);
}

}  // namespace oracle

namespace testutil {

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  auto dir = std::filesystem::temp_directory_path() /
             ("gaudit_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Runs a shell command, returning its exit status.
inline int run(const std::string& command) {
  const int status = std::system((command + " >/dev/null 2>&1").c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace testutil
