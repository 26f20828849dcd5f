#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gaudit/dataset.hpp"

namespace gaudit {

/// Binary entropy in nats.
double binary_entropy(double p);
/// MI in nats between a uniform bit and its copy flipped with probability p.
double channel_mi(double p);

/// Joint distribution of (A, Y) with its information quantities.
struct JointSpec {
  Eigen::MatrixXd probabilities;  // C_A x C_Y
  double analytic_mi = 0.0;
  double analytic_h_a = 0.0;
  double analytic_h_y = 0.0;

  /// Validates (entries >= 0, sum 1 +- 1e-9) and computes the analytic values.
  static JointSpec from_probabilities(Eigen::MatrixXd p);
};

std::pair<CategoricalSeries, CategoricalSeries> sample_joint(const JointSpec& spec, std::size_t n,
                                                             std::uint64_t seed);

struct ChannelSpec {
  double flip_probability = 0.0;
  int copies = 1;
  int distractor_count = 0;

  void validate() const;
};

/// `copies` columns of A flipped independently with probability p, then
/// `distractor_count` columns of uniform noise on [0, 1).
Eigen::MatrixXd noise_features(const CategoricalSeries& a, const ChannelSpec& ch, std::uint64_t seed);

/// A generated dataset plus its analytic ground truth.
struct SyntheticData {
  std::string kind;
  Dataset dataset;  // raw columns, not yet encoded
  std::map<std::string, double> truth;
  std::map<std::string, std::string> notes;
};

/// A -> Y -> X. A uniform, Y = A flipped w.p. 0.2, X = 3 copies of Y flipped
/// w.p. 0.05 plus 2 noise columns.
SyntheticData chain_dataset(std::size_t n, std::uint64_t seed);
/// A -> Y <- Z -> X. Y = (A or Z) flipped w.p. 0.1, X = 3 copies of Z flipped
/// w.p. 0.05 plus 2 noise columns.
SyntheticData collider_dataset(std::size_t n, std::uint64_t seed);
/// A uniform, features from noise_features(A), Y an independent fair coin
/// unless `label_flip` < 0.5 (then Y = A flipped w.p. label_flip).
SyntheticData channel_dataset(std::size_t n, const ChannelSpec& ch, std::uint64_t seed, double label_flip = 0.5);
/// (A, Y) drawn from the joint; one noise feature.
SyntheticData joint_dataset(const JointSpec& spec, std::size_t n, std::uint64_t seed);

/// Independent uniform attributes "planted_<i>", each leaking into one
/// feature column through a channel with the given flip probability, next to
/// 4 label features (copies of Y flipped w.p. 0.25).
SyntheticData planted_suite(std::size_t n, std::uint64_t seed,
                            const std::vector<double>& flips = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5});

/// Attribute "shortcut" = Y flipped w.p. 0.19 (normalized utility near 0.3)
/// copied verbatim into a feature, attribute "noise" independent of all else,
/// and 3 weak label features (Y flipped w.p. 0.3).
SyntheticData shortcut_dataset(std::size_t n, std::uint64_t seed);

/// Binary Y with `copies` weak label features (Y flipped w.p. `signal_flip`)
/// and 2 noise columns; the base set for calibration runs.
SyntheticData weak_signal_dataset(std::size_t n, std::uint64_t seed, double signal_flip = 0.3, int copies = 3);

/// Tabular set shaped like an EHR extract: `features` columns (a sixth of
/// them binary, the rest Gaussian mixtures of 6 latent factors), `attributes`
/// demographic-style attributes (continuous, binary and multi-level, some with
/// missing cells) and a binary outcome driven by the latents.
SyntheticData ehr_like_dataset(std::size_t n, std::size_t features, std::size_t attributes, std::uint64_t seed);

}  // namespace gaudit
