#include "gaudit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gaudit/errors.hpp"
#include "gaudit/seeding.hpp"

namespace gaudit {

namespace {

// 53-bit uniform on [0, 1), identical on every platform for a given engine state.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int flip(int bit, double p, std::mt19937_64& rng) { return unit(rng) < p ? 1 - bit : bit; }

std::vector<int> fair_bits(std::size_t n, std::mt19937_64& rng) {
  std::vector<int> out(n);
  for (auto& b : out) b = unit(rng) < 0.5 ? 1 : 0;
  return out;
}

std::vector<std::string> bit_labels(const std::vector<int>& bits) {
  std::vector<std::string> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? "1" : "0";
  return out;
}

CategoricalSeries as_series(const std::vector<int>& bits) {
  CategoricalSeries s;
  s.codes = bits;
  s.names = {"0", "1"};
  return s;
}

void append_features(Dataset& ds, const Eigen::MatrixXd& m, const std::string& prefix, Eigen::Index from,
                     Eigen::Index count) {
  for (Eigen::Index j = 0; j < count; ++j) {
    std::vector<double> values(m.col(from + j).data(), m.col(from + j).data() + m.rows());
    ds.raw_features.push_back(RawColumn::continuous(prefix + std::to_string(j), std::move(values)));
  }
}

Dataset skeleton(std::size_t n, const std::vector<int>& y) {
  Dataset ds;
  ds.n_rows = n;
  ds.label = RawColumn::categorical("Y", bit_labels(y));
  return ds;
}

void require_rows(std::size_t n, std::size_t min) {
  if (n < min) throw ConfigError("n must be >= " + std::to_string(min));
}

}  // namespace

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

double channel_mi(double p) { return std::numbers::ln2 - binary_entropy(p); }

JointSpec JointSpec::from_probabilities(Eigen::MatrixXd p) {
  if (p.size() == 0) throw ConfigError("joint: empty probability table");
  if ((p.array() < 0.0).any() || !p.allFinite()) throw ConfigError("joint: probabilities must be finite and >= 0");
  if (std::abs(p.sum() - 1.0) > 1e-9) throw ConfigError("joint: probabilities must sum to 1");
  JointSpec s;
  s.probabilities = std::move(p);
  const Eigen::VectorXd pa = s.probabilities.rowwise().sum();
  const Eigen::RowVectorXd py = s.probabilities.colwise().sum();
  auto h = [](auto v) {
    double out = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) > 0.0) out -= v(i) * std::log(v(i));
    }
    return out;
  };
  s.analytic_h_a = h(pa);
  s.analytic_h_y = h(py);
  for (Eigen::Index i = 0; i < s.probabilities.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.probabilities.cols(); ++j) {
      const double pij = s.probabilities(i, j);
      if (pij > 0.0) s.analytic_mi += pij * std::log(pij / (pa(i) * py(j)));
    }
  }
  return s;
}

std::pair<CategoricalSeries, CategoricalSeries> sample_joint(const JointSpec& spec, std::size_t n,
                                                             std::uint64_t seed) {
  if (n < 1) throw ConfigError("n must be >= 1");
  const Eigen::Index R = spec.probabilities.rows();
  const Eigen::Index C = spec.probabilities.cols();
  std::vector<double> cumulative;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < R; ++i) {
    for (Eigen::Index j = 0; j < C; ++j) cumulative.push_back(acc += spec.probabilities(i, j));
  }
  CategoricalSeries a, y;
  for (Eigen::Index i = 0; i < R; ++i) a.names.push_back(std::to_string(i));
  for (Eigen::Index j = 0; j < C; ++j) y.names.push_back(std::to_string(j));
  a.codes.resize(n);
  y.codes.resize(n);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = unit(rng) * acc;
    auto cell = static_cast<Eigen::Index>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    cell = std::min(cell, R * C - 1);
    a.codes[k] = static_cast<int>(cell / C);
    y.codes[k] = static_cast<int>(cell % C);
  }
  return {a, y};
}

void ChannelSpec::validate() const {
  if (!(flip_probability >= 0.0 && flip_probability <= 0.5)) throw ConfigError("flip probability must lie in [0, 0.5]");
  if (copies < 1) throw ConfigError("copies must be >= 1");
  if (distractor_count < 0) throw ConfigError("distractor count must be >= 0");
}

Eigen::MatrixXd noise_features(const CategoricalSeries& a, const ChannelSpec& ch, std::uint64_t seed) {
  ch.validate();
  if (a.category_count() > 2) throw DataError("noise_features expects a binary attribute");
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd out(n, ch.copies + ch.distractor_count);
  std::mt19937_64 rng(seed);
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = j < ch.copies ? flip(a.codes[static_cast<std::size_t>(i)], ch.flip_probability, rng) : unit(rng);
    }
  }
  return out;
}

SyntheticData chain_dataset(std::size_t n, std::uint64_t seed) {
  require_rows(n, 100);
  constexpr double kAy = 0.2;
  constexpr double kYx = 0.05;
  std::mt19937_64 rng(seed);
  const auto a = fair_bits(n, rng);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = flip(a[i], kAy, rng);
  const Eigen::MatrixXd x = noise_features(as_series(y), {kYx, 3, 2}, derive_seed(seed, {std::string_view("x")}));

  SyntheticData out;
  out.kind = "chain";
  out.dataset = skeleton(n, y);
  append_features(out.dataset, x, "x", 0, 3);
  append_features(out.dataset, x, "noise", 3, 2);
  out.dataset.attributes.push_back(RawColumn::categorical("A", bit_labels(a)));
  const double through = kAy * (1 - kYx) + (1 - kAy) * kYx;
  out.truth["flip_a_to_y"] = kAy;
  out.truth["flip_y_to_x"] = kYx;
  out.truth["utility_mi"] = channel_mi(kAy);
  out.truth["utility_nmi"] = channel_mi(kAy) / std::numbers::ln2;
  out.truth["mi_a_x_column"] = channel_mi(through);
  out.truth["conditional_mi_a_x_given_y"] = 0.0;
  out.notes["structure"] = "A -> Y -> X";
  return out;
}

SyntheticData collider_dataset(std::size_t n, std::uint64_t seed) {
  require_rows(n, 100);
  constexpr double kYFlip = 0.1;
  constexpr double kZx = 0.05;
  std::mt19937_64 rng(seed);
  const auto a = fair_bits(n, rng);
  const auto z = fair_bits(n, rng);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = flip(a[i] | z[i], kYFlip, rng);
  const Eigen::MatrixXd x = noise_features(as_series(z), {kZx, 3, 2}, derive_seed(seed, {std::string_view("x")}));

  SyntheticData out;
  out.kind = "collider";
  out.dataset = skeleton(n, y);
  append_features(out.dataset, x, "x", 0, 3);
  append_features(out.dataset, x, "noise", 3, 2);
  out.dataset.attributes.push_back(RawColumn::categorical("A", bit_labels(a)));

  // enumerate P(a, x, y) for one feature column, then MI(A; X | Y = 1)
  double p[2][2][2] = {};
  for (int av = 0; av < 2; ++av) {
    for (int zv = 0; zv < 2; ++zv) {
      for (int xv = 0; xv < 2; ++xv) {
        for (int yv = 0; yv < 2; ++yv) {
          const double py = (yv == (av | zv)) ? 1 - kYFlip : kYFlip;
          const double px = (xv == zv) ? 1 - kZx : kZx;
          p[av][xv][yv] += 0.25 * py * px;
        }
      }
    }
  }
  auto conditional_mi = [&](int yv) {
    double py = 0.0, pa[2] = {}, px[2] = {};
    for (int av = 0; av < 2; ++av) {
      for (int xv = 0; xv < 2; ++xv) {
        py += p[av][xv][yv];
        pa[av] += p[av][xv][yv];
        px[xv] += p[av][xv][yv];
      }
    }
    double mi = 0.0;
    for (int av = 0; av < 2; ++av) {
      for (int xv = 0; xv < 2; ++xv) {
        const double j = p[av][xv][yv] / py;
        if (j > 0) mi += j * std::log(j / ((pa[av] / py) * (px[xv] / py)));
      }
    }
    return std::pair{py, mi};
  };
  const auto [p1, mi1] = conditional_mi(1);
  const auto [p0, mi0] = conditional_mi(0);
  out.truth["flip_y"] = kYFlip;
  out.truth["flip_z_to_x"] = kZx;
  out.truth["mi_a_x_column"] = 0.0;
  out.truth["mi_a_x_column_given_y1"] = mi1;
  out.truth["conditional_mi_a_x_given_y"] = p0 * mi0 + p1 * mi1;
  out.notes["structure"] = "A -> Y <- Z -> X";
  return out;
}

SyntheticData channel_dataset(std::size_t n, const ChannelSpec& ch, std::uint64_t seed, double label_flip) {
  require_rows(n, 1);
  ch.validate();
  std::mt19937_64 rng(seed);
  const auto a = fair_bits(n, rng);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = label_flip >= 0.5 ? (unit(rng) < 0.5 ? 1 : 0) : flip(a[i], label_flip, rng);
  const Eigen::MatrixXd x = noise_features(as_series(a), ch, derive_seed(seed, {std::string_view("x")}));

  SyntheticData out;
  out.kind = "channel";
  out.dataset = skeleton(n, y);
  append_features(out.dataset, x, "x", 0, ch.copies);
  append_features(out.dataset, x, "noise", ch.copies, ch.distractor_count);
  out.dataset.attributes.push_back(RawColumn::categorical("A", bit_labels(a)));
  out.truth["flip_probability"] = ch.flip_probability;
  out.truth["copies"] = ch.copies;
  out.truth["distractors"] = ch.distractor_count;
  out.truth["mi_a_x_column"] = channel_mi(ch.flip_probability);
  out.truth["utility_mi"] = label_flip >= 0.5 ? 0.0 : channel_mi(label_flip);
  return out;
}

SyntheticData joint_dataset(const JointSpec& spec, std::size_t n, std::uint64_t seed) {
  auto [a, y] = sample_joint(spec, n, seed);
  std::mt19937_64 rng(derive_seed(seed, {std::string_view("noise")}));
  std::vector<double> noise(n);
  for (auto& v : noise) v = unit(rng);

  SyntheticData out;
  out.kind = "joint";
  out.dataset.n_rows = n;
  std::vector<std::string> ys(n), as(n);
  for (std::size_t i = 0; i < n; ++i) {
    ys[i] = y.names[static_cast<std::size_t>(y.codes[i])];
    as[i] = a.names[static_cast<std::size_t>(a.codes[i])];
  }
  out.dataset.label = RawColumn::categorical("Y", std::move(ys));
  out.dataset.attributes.push_back(RawColumn::categorical("A", std::move(as)));
  out.dataset.raw_features.push_back(RawColumn::continuous("noise0", std::move(noise)));
  out.truth["analytic_mi"] = spec.analytic_mi;
  out.truth["analytic_h_a"] = spec.analytic_h_a;
  out.truth["analytic_h_y"] = spec.analytic_h_y;
  return out;
}

SyntheticData planted_suite(std::size_t n, std::uint64_t seed, const std::vector<double>& flips) {
  require_rows(n, 100);
  std::mt19937_64 rng(seed);
  const auto y = fair_bits(n, rng);
  SyntheticData out;
  out.kind = "planted";
  out.dataset = skeleton(n, y);
  const Eigen::MatrixXd signal = noise_features(as_series(y), {0.25, 4, 0}, derive_seed(seed, {std::string_view("signal")}));
  append_features(out.dataset, signal, "signal", 0, 4);
  for (std::size_t k = 0; k < flips.size(); ++k) {
    const auto a = fair_bits(n, rng);
    const Eigen::MatrixXd leak =
        noise_features(as_series(a), {flips[k], 1, 0}, derive_seed(seed, {std::string_view("leak"), static_cast<std::int64_t>(k)}));
    const std::string name = "planted_" + std::to_string(k);
    std::vector<double> values(leak.col(0).data(), leak.col(0).data() + leak.rows());
    out.dataset.raw_features.push_back(RawColumn::continuous("leak_" + std::to_string(k), std::move(values)));
    out.dataset.attributes.push_back(RawColumn::categorical(name, bit_labels(a)));
    out.truth[name + ".flip_probability"] = flips[k];
    out.truth[name + ".mi_a_x_column"] = channel_mi(flips[k]);
  }
  return out;
}

SyntheticData shortcut_dataset(std::size_t n, std::uint64_t seed) {
  require_rows(n, 100);
  constexpr double kShortcutFlip = 0.19;
  std::mt19937_64 rng(seed);
  const auto y = fair_bits(n, rng);
  std::vector<int> shortcut(n);
  for (std::size_t i = 0; i < n; ++i) shortcut[i] = flip(y[i], kShortcutFlip, rng);
  const auto noise = fair_bits(n, rng);

  SyntheticData out;
  out.kind = "shortcut";
  out.dataset = skeleton(n, y);
  const Eigen::MatrixXd weak = noise_features(as_series(y), {0.3, 3, 0}, derive_seed(seed, {std::string_view("signal")}));
  append_features(out.dataset, weak, "signal", 0, 3);
  out.dataset.raw_features.push_back(
      RawColumn::continuous("artifact", std::vector<double>(shortcut.begin(), shortcut.end())));
  out.dataset.attributes.push_back(RawColumn::categorical("shortcut", bit_labels(shortcut)));
  out.dataset.attributes.push_back(RawColumn::categorical("noise", bit_labels(noise)));
  out.truth["shortcut.utility_nmi"] = channel_mi(kShortcutFlip) / std::numbers::ln2;
  out.truth["shortcut.detectability"] = 1.0;
  out.truth["noise.utility_nmi"] = 0.0;
  out.truth["noise.detectability"] = 0.0;
  return out;
}

SyntheticData weak_signal_dataset(std::size_t n, std::uint64_t seed, double signal_flip, int copies) {
  require_rows(n, 100);
  std::mt19937_64 rng(seed);
  const auto y = fair_bits(n, rng);
  SyntheticData out;
  out.kind = "weak_signal";
  out.dataset = skeleton(n, y);
  const Eigen::MatrixXd x =
      noise_features(as_series(y), {signal_flip, copies, 2}, derive_seed(seed, {std::string_view("signal")}));
  append_features(out.dataset, x, "signal", 0, copies);
  append_features(out.dataset, x, "noise", copies, 2);
  out.truth["signal_flip"] = signal_flip;
  out.truth["mi_y_x_column"] = channel_mi(signal_flip);
  return out;
}

SyntheticData ehr_like_dataset(std::size_t n, std::size_t features, std::size_t attributes, std::uint64_t seed) {
  require_rows(n, 100);
  if (features < 1) throw ConfigError("features must be >= 1");
  constexpr int kLatent = 6;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd latent(static_cast<Eigen::Index>(n), kLatent);
  for (Eigen::Index j = 0; j < kLatent; ++j) {
    for (Eigen::Index i = 0; i < latent.rows(); ++i) latent(i, j) = normal(rng);
  }

  SyntheticData out;
  out.kind = "ehr_like";
  out.dataset.n_rows = n;
  const std::size_t binary_every = 6;
  for (std::size_t f = 0; f < features; ++f) {
    Eigen::VectorXd w(kLatent);
    for (auto& v : w) v = normal(rng) / std::sqrt(static_cast<double>(kLatent));
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = latent.row(static_cast<Eigen::Index>(i)).dot(w) + 0.7 * normal(rng);
      values[i] = f % binary_every == binary_every - 1 ? (s > 0.3 ? 1.0 : 0.0) : s;
    }
    out.dataset.raw_features.push_back(RawColumn::continuous("f" + std::to_string(f), std::move(values)));
  }

  std::vector<std::string> outcome(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double logit = -1.8 + 0.9 * latent(r, 0) - 0.6 * latent(r, 1) + 0.4 * latent(r, 2);
    outcome[i] = unit(rng) < 1.0 / (1.0 + std::exp(-logit)) ? "1" : "0";
  }
  out.dataset.label = RawColumn::categorical("outcome", std::move(outcome));

  const std::vector<std::string> five = {"a", "b", "c", "d", "e"};
  const std::vector<double> five_cuts = {0.5, 1.0, 1.4, 1.8};
  for (std::size_t k = 0; k < attributes; ++k) {
    const auto source = static_cast<Eigen::Index>(k % kLatent);
    const double strength = k % 4 == 3 ? 0.0 : 0.3 + 0.15 * static_cast<double>(k % 3);
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) {
      score[i] = strength * latent(static_cast<Eigen::Index>(i), source) + std::sqrt(1.0 - strength * strength) * normal(rng);
    }
    const std::string name = "attr" + std::to_string(k);
    RawColumn col;
    switch (k % 3) {
      case 0: {  // continuous, age-like
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = std::round(60.0 + 15.0 * score[i]);
        col = RawColumn::continuous(name, std::move(v));
        break;
      }
      case 1: {
        std::vector<std::string> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = score[i] > 0.2 ? "yes" : "no";
        col = RawColumn::categorical(name, std::move(v));
        break;
      }
      default: {
        std::vector<std::string> v(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto level = std::upper_bound(five_cuts.begin(), five_cuts.end(), score[i]) - five_cuts.begin();
          v[i] = five[static_cast<std::size_t>(level)];
        }
        col = RawColumn::categorical(name, std::move(v));
        break;
      }
    }
    if (k % 4 == 1) {  // sprinkle 3% missing cells
      for (std::size_t i = 0; i < n; ++i) {
        if (unit(rng) < 0.03) {
          col.missing[i] = 1;
          if (col.kind == ColumnKind::continuous) col.numbers[i] = std::nan("");
          else col.labels[i].clear();
        }
      }
    }
    out.truth[name + ".latent_loading"] = strength;
    out.dataset.attributes.push_back(std::move(col));
  }
  return out;
}

}  // namespace gaudit
