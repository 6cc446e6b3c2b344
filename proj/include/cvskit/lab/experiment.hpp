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

#ifndef CVSKIT_LAB_EXPERIMENT_HPP
#define CVSKIT_LAB_EXPERIMENT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvskit/datamodel.hpp"
#include "cvskit/lab/config.hpp"
#include "cvskit/lab/dataset.hpp"
#include "cvskit/lab/optimizer.hpp"
#include "cvskit/lab/ternary_net.hpp"
#include "cvskit/quadrants.hpp"

namespace cvs::lab {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainState {
  TernaryNetwork net;
  OptimizerState opt;
};

inline std::vector<int> layer_sizes(const LabConfig& c) {
  std::vector<int> sizes{c.n_features};
  for (int i = 0; i < c.hidden_layers; ++i) sizes.push_back(c.hidden_width);
  sizes.push_back(2);
  return sizes;
}

inline TrainState init_state(const LabConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto sizes = layer_sizes(c);
  TrainState s{make_network(sizes, c.weight_magnitude, c.init_zero_bias, rng),
               {}};
  s.opt = OptimizerState::for_network(s.net);
  return s;
}

struct EpochStats {
  double train_acc = 0.0;  // running soft-mode accuracy during the epoch
  double mean_loss = 0.0;
};

/// One pass of minibatch descent over `data` in a seed-determined order,
/// with fresh Gumbel noise per minibatch.
inline EpochStats train_epoch(TrainState& state, const SyntheticDataset& data,
                              const FractalBands& bands, double tau,
                              int batch_size, std::uint64_t seed) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (data.n_features != state.net.input_dim()) {
    throw InvalidArgument("dataset and network dimensions differ");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> xb;
  std::vector<int> yb;
  double loss_sum = 0.0;
  long correct = 0;
  for (std::size_t start = 0; start < order.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(order.size(), start + static_cast<std::size_t>(batch_size));
    xb.clear();
    yb.clear();
    for (std::size_t k = start; k < end; ++k) {
      const auto row = data.row(order[k]);
      xb.insert(xb.end(), row.begin(), row.end());
      yb.push_back(data.labels[order[k]]);
    }
    const auto noise = sample_noise(state.net, rng);
    auto grads = zero_gradients(state.net);
    const auto br = soft_loss_and_gradient(state.net, xb, yb, tau, noise, &grads);
    if (!std::isfinite(br.loss)) {
      throw TrainingError("non-finite loss in minibatch starting at sample " +
                          std::to_string(start));
    }
    apply_update(state.net, state.opt, grads, bands);
    loss_sum += br.loss * static_cast<double>(end - start);
    correct += br.correct;
  }
  const double n = static_cast<double>(data.size());
  return {n > 0 ? static_cast<double>(correct) / n : 0.0,
          n > 0 ? loss_sum / n : 0.0};
}

/// Hard-mode predictions on every sample, as prediction-log records.
inline std::vector<PredictionRecord> evaluate(const TernaryNetwork& net,
                                              const SyntheticDataset& data,
                                              const CommitmentRule& rule) {
  const auto ew = effective_weights(net, Mode::Hard, 1.0);
  std::vector<PredictionRecord> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = summarize(propagate(net, ew, data.row(i)), ew.zero_fraction,
                             rule);
    PredictionRecord rec;
    rec.sample_id = "test-" + std::to_string(i);
    rec.predicted = r.predicted;
    rec.actual = data.labels[i];
    rec.confidence = r.confidence;
    rec.committed = r.committed;
    out.push_back(std::move(rec));
  }
  return out;
}

struct ExperimentResult {
  Trajectory trajectory;
  std::vector<std::vector<PredictionRecord>> logs;  // one per epoch
};

/// Derived seeds for data, initialization and each epoch's training stream.
struct SeedPlan {
  std::uint64_t init = 0;
  std::uint64_t train = 0;

  static SeedPlan from(std::uint64_t seed) {
    std::seed_seq seq{seed, std::uint64_t{0x1ab}};
    std::array<std::uint64_t, 2> s{};
    seq.generate(s.begin(), s.end());
    return {s[0], s[1]};
  }
  std::uint64_t epoch(int e) const {
    return train + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(e);
  }
};

inline ExperimentResult run_experiment(const LabConfig& config) {
  config.validate();
  ExperimentResult result;
  result.trajectory.dataset_label =
      "lab rho=" + std::to_string(config.ambiguity_fraction) +
      " tau=" + std::to_string(config.tau) +
      " seed=" + std::to_string(config.seed);
  if (config.epochs == 0) return result;

  const auto split = make_split(config);
  const auto seeds = SeedPlan::from(config.seed);
  auto state = init_state(config, seeds.init);
  const auto bands = fractal_lr_bands(config.base_lr, config.batch_size);
  const CommitmentRule rule{config.certainty_threshold, config.zero_state_cap};
  AnalysisConfig analysis;
  analysis.certainty_threshold = config.certainty_threshold;

  for (int e = 1; e <= config.epochs; ++e) {
    const auto stats = train_epoch(state, split.train, bands, config.tau,
                                   config.batch_size, seeds.epoch(e));
    auto log = evaluate(state.net, split.test, rule);
    EpochSummary s;
    s.epoch = e;
    s.train_acc = stats.train_acc;
    s.train_loss = stats.mean_loss;
    s.matrix = accumulate_matrix(log, analysis);
    s.metrics = derive_metrics(*s.matrix);
    s.test_acc = *s.metrics->accuracy;
    result.trajectory.epochs.push_back(std::move(s));
    result.logs.push_back(std::move(log));
  }
  return result;
}

/// Mean test accuracy over the last `window` epochs.
inline double plateau_accuracy(const Trajectory& t, int window = 5) {
  if (t.empty()) throw InvalidArgument("plateau of empty trajectory");
  const auto n = t.epochs.size();
  const auto k = std::min<std::size_t>(n, static_cast<std::size_t>(window));
  double sum = 0.0;
  for (std::size_t i = n - k; i < n; ++i) sum += t.epochs[i].test_acc;
  return sum / static_cast<double>(k);
}

/// Mean CVS over the last `window` epochs that have one defined.
inline std::optional<double> plateau_cvs(const Trajectory& t, int window = 5) {
  const auto n = t.epochs.size();
  const auto k = std::min<std::size_t>(n, static_cast<std::size_t>(window));
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = n - k; i < n; ++i) {
    const auto& e = t.epochs[i];
    if (e.metrics && e.metrics->cvs) {
      sum += *e.metrics->cvs;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

/// One row of a temperature sweep. The best epoch is the max-accuracy
/// checkpoint; plateau figures average the last five epochs. Plateau CVS is
/// the comparison figure: per-epoch CVS spikes toward 1 in early epochs that
/// commit to only a handful of easy samples.
struct SweepRow {
  double tau = 0.0;
  int best_epoch = 0;
  double best_accuracy = 0.0;
  std::optional<double> best_epoch_cvs;
  double plateau_accuracy = 0.0;
  std::optional<double> plateau_cvs;
};

inline SweepRow summarize_run(double tau, const Trajectory& t) {
  SweepRow row;
  row.tau = tau;
  if (t.empty()) return row;
  for (const auto& e : t.epochs) {
    if (row.best_epoch == 0 || e.test_acc > row.best_accuracy) {
      row.best_accuracy = e.test_acc;
      row.best_epoch = e.epoch;
      row.best_epoch_cvs = e.metrics ? e.metrics->cvs : std::nullopt;
    }
  }
  row.plateau_accuracy = plateau_accuracy(t);
  row.plateau_cvs = plateau_cvs(t);
  return row;
}

/// Temperature with the highest plateau CVS; ties go to the earlier row.
inline std::optional<double> best_tau_by_cvs(std::span<const SweepRow> rows) {
  std::optional<double> best_tau;
  double best = 0.0;
  for (const auto& r : rows) {
    if (r.plateau_cvs && (!best_tau || *r.plateau_cvs > best)) {
      best = *r.plateau_cvs;
      best_tau = r.tau;
    }
  }
  return best_tau;
}

/// One run per temperature, all sharing the config seed. Runs are
/// independent and execute concurrently; rows come back in input order.
inline std::vector<SweepRow> tau_sweep(const LabConfig& config,
                                       std::span<const double> taus) {
  for (double tau : taus) {
    if (!(tau > 0.0)) throw InvalidArgument("tau_sweep: every tau must be > 0");
  }
  std::vector<std::future<SweepRow>> jobs;
  for (double tau : taus) {
    LabConfig c = config;
    c.tau = tau;
    jobs.push_back(std::async(std::launch::async, [c] {
      return summarize_run(c.tau, run_experiment(c).trajectory);
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

}  // namespace cvs::lab

#endif  // CVSKIT_LAB_EXPERIMENT_HPP
