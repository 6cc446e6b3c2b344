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

#ifndef CVSKIT_TRAJECTORY_HPP
#define CVSKIT_TRAJECTORY_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cvskit/datamodel.hpp"
#include "cvskit/quadrants.hpp"

namespace cvs {

// Sign conventions: the generalization gap is test - train (positive when
// the model generalizes ahead of fitting); the phase module's divergence is
// train - test. Both are reported in percentage points.

/// test_acc - train_acc, in percentage points.
inline double epoch_gap(const EpochSummary& e) {
  return (e.test_acc - e.train_acc) * 100.0;
}

struct SpikeVerdict {
  bool present = false;
  double gap = 0.0;  // epoch-1 gap, percentage points
};

/// Early positive generalization gap at epoch 1.
inline SpikeVerdict platonic_spike(const Trajectory& t,
                                   const AnalysisConfig& config) {
  if (t.empty() || t.epochs.front().epoch != 1) {
    throw InvalidArgument("platonic_spike needs epoch 1");
  }
  const double gap = epoch_gap(t.epochs.front());
  return {gap >= config.spike_delta, gap};
}

struct MigrationReport {
  int from_epoch = 0;
  int to_epoch = 0;
  std::int64_t delta_cc = 0;
  std::int64_t delta_ci = 0;
  std::int64_t delta_uc = 0;
  std::int64_t delta_ui = 0;
  std::optional<double> delta_approp_uncert;
  std::optional<double> delta_cvs;
  std::optional<double> delta_accuracy;
  // Error mass moved from the uncertain to the confident column.
  bool migration_flag = false;
};

inline MigrationReport detect_migration(const EpochSummary& prev,
                                        const EpochSummary& next) {
  if (!prev.matrix || !next.matrix) {
    throw InvalidArgument("detect_migration needs matrices on both epochs");
  }
  const auto& a = *prev.matrix;
  const auto& b = *next.matrix;
  MigrationReport r;
  r.from_epoch = prev.epoch;
  r.to_epoch = next.epoch;
  r.delta_cc = b.cc - a.cc;
  r.delta_ci = b.ci - a.ci;
  r.delta_uc = b.uc - a.uc;
  r.delta_ui = b.ui - a.ui;
  const auto ma = derive_metrics(a);
  const auto mb = derive_metrics(b);
  auto diff = [](const std::optional<double>& x,
                 const std::optional<double>& y) -> std::optional<double> {
    if (x && y) return *y - *x;
    return std::nullopt;
  };
  r.delta_approp_uncert = diff(ma.approp_uncert, mb.approp_uncert);
  r.delta_cvs = diff(ma.cvs, mb.cvs);
  r.delta_accuracy = diff(ma.accuracy, mb.accuracy);
  r.migration_flag = r.delta_ui < 0 && r.delta_ci > 0;
  return r;
}

/// Reports for every consecutive pair of epochs that both carry matrices.
inline std::vector<MigrationReport> migration_series(const Trajectory& t) {
  std::vector<MigrationReport> out;
  for (std::size_t i = 1; i < t.epochs.size(); ++i) {
    if (t.epochs[i - 1].matrix && t.epochs[i].matrix) {
      out.push_back(detect_migration(t.epochs[i - 1], t.epochs[i]));
    }
  }
  return out;
}

inline std::optional<double> cvs_of(const EpochSummary& e) {
  if (e.metrics) return e.metrics->cvs;
  if (e.matrix) return derive_metrics(*e.matrix).cvs;
  return std::nullopt;
}

/// First epoch whose CVS drops below the previous epoch's while test
/// accuracy holds (within accuracy_tolerance points). Epochs without a
/// defined CVS are skipped.
inline std::optional<int> benign_onset(const Trajectory& t,
                                       const AnalysisConfig& config) {
  const EpochSummary* prev = nullptr;
  std::optional<double> prev_cvs;
  for (const auto& e : t.epochs) {
    const auto cvs = cvs_of(e);
    if (!cvs) continue;
    if (prev && *cvs < *prev_cvs &&
        e.test_acc * 100.0 >= prev->test_acc * 100.0 - config.accuracy_tolerance) {
      return e.epoch;
    }
    prev = &e;
    prev_cvs = cvs;
  }
  return std::nullopt;
}

enum class RecoveryQuality { Complete, Partial, None };

inline std::string_view to_string(RecoveryQuality q) {
  switch (q) {
    case RecoveryQuality::Complete: return "complete";
    case RecoveryQuality::Partial: return "partial";
    case RecoveryQuality::None: return "none";
  }
  return "?";
}

/// A sharp test-accuracy drop and the epochs spent below the recovery band
/// (pre-collapse accuracy minus collapse_delta). Accuracies are fractions.
struct CollapseEvent {
  int onset_epoch = 0;
  double pre_collapse_acc = 0.0;
  double depth = 0.0;  // minimum test accuracy during the event
  int duration = 0;    // epochs below the band
  bool recovered = false;
  std::optional<int> recovery_epoch;
  std::optional<double> recovery_acc;
  RecoveryQuality quality = RecoveryQuality::None;
};

inline std::vector<CollapseEvent> detect_collapses(
    const Trajectory& t, const AnalysisConfig& config) {
  std::vector<CollapseEvent> events;
  const auto& ep = t.epochs;
  const double drop = config.collapse_delta / 100.0;
  std::size_t i = 1;
  while (i < ep.size()) {
    const double pre = ep[i - 1].test_acc;
    if (!(ep[i].test_acc <= pre - drop)) {
      ++i;
      continue;
    }
    CollapseEvent ev;
    ev.onset_epoch = ep[i].epoch;
    ev.pre_collapse_acc = pre;
    ev.depth = ep[i].test_acc;
    ev.duration = 1;
    std::size_t j = i + 1;
    while (j < ep.size() && ep[j].test_acc < pre - drop) {
      ev.depth = std::min(ev.depth, ep[j].test_acc);
      ++ev.duration;
      ++j;
    }
    if (j < ep.size()) {
      ev.recovered = true;
      ev.recovery_epoch = ep[j].epoch;
      ev.recovery_acc = ep[j].test_acc;
      ev.quality = ep[j].test_acc * 100.0 >=
                           pre * 100.0 - config.recovery_delta
                       ? RecoveryQuality::Complete
                       : RecoveryQuality::Partial;
    }
    events.push_back(ev);
    i = j + 1;
  }
  return events;
}

struct StabilityReport {
  std::optional<double> epoch1_gap;  // percentage points
  double peak_test_acc = 0.0;
  int peak_epoch = 0;
  std::vector<CollapseEvent> collapses;
  // Headline figures describe the first collapse, as in the usual
  // filtered/full side-by-side comparison.
  std::optional<double> collapse_depth;
  std::optional<int> collapse_duration;
  // Worst quality over all events; empty when nothing collapsed.
  std::optional<RecoveryQuality> recovery;
};

inline StabilityReport stability_report(const Trajectory& t,
                                        const AnalysisConfig& config) {
  validate_trajectory(t);
  StabilityReport r;
  if (t.epochs.front().epoch == 1) r.epoch1_gap = epoch_gap(t.epochs.front());
  r.peak_test_acc = t.epochs.front().test_acc;
  r.peak_epoch = t.epochs.front().epoch;
  for (const auto& e : t.epochs) {
    if (e.test_acc > r.peak_test_acc) {
      r.peak_test_acc = e.test_acc;
      r.peak_epoch = e.epoch;
    }
  }
  r.collapses = detect_collapses(t, config);
  if (!r.collapses.empty()) {
    r.collapse_depth = r.collapses.front().depth;
    r.collapse_duration = r.collapses.front().duration;
    auto worst = RecoveryQuality::Complete;
    for (const auto& ev : r.collapses) {
      if (ev.quality == RecoveryQuality::None) worst = RecoveryQuality::None;
      if (ev.quality == RecoveryQuality::Partial &&
          worst == RecoveryQuality::Complete) {
        worst = RecoveryQuality::Partial;
      }
    }
    r.recovery = worst;
  }
  return r;
}

struct CheckpointPolicy {
  enum class Kind { MaxAccuracy, MaxCVS, Joint };
  Kind kind = Kind::MaxAccuracy;
  double weight = 0.5;  // Joint only: weight on accuracy

  static CheckpointPolicy max_accuracy() { return {Kind::MaxAccuracy, 1.0}; }
  static CheckpointPolicy max_cvs() { return {Kind::MaxCVS, 0.0}; }
  static CheckpointPolicy joint(double w) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw InvalidArgument("joint weight must lie in [0,1]");
    }
    return {Kind::Joint, w};
  }
};

/// Score of one epoch under a policy; throws when the policy needs a CVS the
/// epoch does not have.
inline double checkpoint_score(const EpochSummary& e,
                               const CheckpointPolicy& policy) {
  if (policy.kind == CheckpointPolicy::Kind::MaxAccuracy) return e.test_acc;
  const auto cvs = cvs_of(e);
  if (!cvs) {
    throw InvalidArgument("epoch " + std::to_string(e.epoch) +
                          " has no CVS for the selected policy");
  }
  if (policy.kind == CheckpointPolicy::Kind::MaxCVS) return *cvs;
  return policy.weight * e.test_acc + (1.0 - policy.weight) * *cvs;
}

/// argmax of the policy score; ties go to the earliest epoch.
inline int select_checkpoint(const Trajectory& t,
                             const CheckpointPolicy& policy) {
  if (t.empty()) throw InvalidArgument("select_checkpoint on empty trajectory");
  int best_epoch = t.epochs.front().epoch;
  double best = checkpoint_score(t.epochs.front(), policy);
  for (std::size_t i = 1; i < t.epochs.size(); ++i) {
    const double s = checkpoint_score(t.epochs[i], policy);
    if (s > best) {
      best = s;
      best_epoch = t.epochs[i].epoch;
    }
  }
  return best_epoch;
}

enum class HypothesisVerdict { H1Leaning, H2Leaning };

inline std::string_view to_string(HypothesisVerdict v) {
  return v == HypothesisVerdict::H2Leaning ? "H2-leaning" : "H1-leaning";
}

struct HypothesisReport {
  double ui_share = 0.0;
  HypothesisVerdict verdict = HypothesisVerdict::H1Leaning;
};

/// Capacity-limit (H1: errors are confident) versus ambiguity-limit (H2:
/// errors are flagged uncertain). Undefined when the matrix has no errors.
inline std::optional<HypothesisReport> hypothesis_discriminant(
    const CertaintyValidityMatrix& m) {
  validate_matrix(m);
  if (m.errors() == 0) return std::nullopt;
  HypothesisReport r;
  r.ui_share = static_cast<double>(m.ui) / static_cast<double>(m.errors());
  r.verdict = r.ui_share > 0.5 ? HypothesisVerdict::H2Leaning
                               : HypothesisVerdict::H1Leaning;
  return r;
}

}  // namespace cvs

#endif  // CVSKIT_TRAJECTORY_HPP
