// Copyright 2026 The cvskit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CVSKIT_LAB_DATASET_HPP
#define CVSKIT_LAB_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "cvskit/lab/config.hpp"

namespace cvs::lab {

/// Binary classification data with a known clean/ambiguous split.
///
/// Clean samples come from two Gaussian clusters centered at +/- separation
/// on feature 0; the label is the cluster. Ambiguous samples come from one
/// cluster at the origin; with probability `ambiguous_signal` their label is
/// [x1 > 0], otherwise it is flipped, so the Bayes accuracy on them equals
/// the signal level (0.5: labels carry no information).
struct SyntheticDataset {
  int n_features = 0;
  std::vector<double> features;  // row-major, size() * n_features
  std::vector<int> labels;
  std::vector<bool> ambiguous;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_features,
            static_cast<std::size_t>(n_features)};
  }
  std::size_t ambiguous_count() const {
    return static_cast<std::size_t>(
        std::count(ambiguous.begin(), ambiguous.end(), true));
  }
};

inline SyntheticDataset make_dataset(const LabConfig& config, int n_samples,
                                     std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution keep(config.ambiguous_signal);

  const auto n = static_cast<std::size_t>(n_samples);
  const auto n_ambig = static_cast<std::size_t>(
      std::llround(config.ambiguity_fraction * static_cast<double>(n)));
  std::vector<bool> flags(n, false);
  std::fill(flags.begin(), flags.begin() + static_cast<long>(n_ambig), true);
  std::shuffle(flags.begin(), flags.end(), rng);

  SyntheticDataset d;
  d.n_features = config.n_features;
  d.features.resize(n * static_cast<std::size_t>(config.n_features));
  d.labels.resize(n);
  d.ambiguous = flags;
  for (std::size_t i = 0; i < n; ++i) {
    double* x = d.features.data() + i * config.n_features;
    for (int k = 0; k < config.n_features; ++k) x[k] = normal(rng);
    if (!flags[i]) {
      const int y = coin(rng) ? 1 : 0;
      x[0] += y == 1 ? config.cluster_separation : -config.cluster_separation;
      d.labels[i] = y;
    } else {
      const int rule = x[1] > 0.0 ? 1 : 0;
      d.labels[i] = keep(rng) ? rule : 1 - rule;
    }
  }
  return d;
}

struct DataSplit {
  SyntheticDataset train;
  SyntheticDataset test;
};

/// Train and test splits drawn from independent streams of the config seed.
inline DataSplit make_split(const LabConfig& config) {
  std::seed_seq seq{config.seed, std::uint64_t{0x5eed}};
  std::array<std::uint64_t, 2> seeds{};
  seq.generate(seeds.begin(), seeds.end());
  return {make_dataset(config, config.n_train, seeds[0]),
          make_dataset(config, config.n_test, seeds[1])};
}

/// Accuracy of the Bayes-optimal rule on a sample: the cluster sign for
/// clean samples, the x1 rule for ambiguous ones. Used as a test oracle.
inline double bayes_rule_accuracy(const SyntheticDataset& d) {
  if (d.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto x = d.row(i);
    const int guess = d.ambiguous[i] ? (x[1] > 0.0 ? 1 : 0) : (x[0] > 0.0 ? 1 : 0);
    correct += guess == d.labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

}  // namespace cvs::lab

#endif  // CVSKIT_LAB_DATASET_HPP
