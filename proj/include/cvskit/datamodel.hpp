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

#ifndef CVSKIT_DATAMODEL_HPP
#define CVSKIT_DATAMODEL_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvs {

/// Raised for malformed or out-of-contract input. Messages name the
/// offending line when the error comes from a file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation's precondition does not hold.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One sample as seen by the evaluator.
struct PredictionRecord {
  std::string sample_id;
  std::int64_t predicted = 0;
  std::int64_t actual = 0;
  double confidence = 0.0;
  // Explicit commitment from discrete-output models; overrides the
  // confidence threshold when present.
  std::optional<bool> committed;

  bool operator==(const PredictionRecord&) const = default;
};

/// Counts of the four certainty/validity cells.
struct CertaintyValidityMatrix {
  std::int64_t cc = 0;  // confident, correct
  std::int64_t ci = 0;  // confident, incorrect
  std::int64_t uc = 0;  // uncertain, correct
  std::int64_t ui = 0;  // uncertain, incorrect

  std::int64_t total() const { return cc + ci + uc + ui; }
  std::int64_t committed() const { return cc + ci; }
  std::int64_t uncertain() const { return uc + ui; }
  std::int64_t errors() const { return ci + ui; }

  bool operator==(const CertaintyValidityMatrix&) const = default;
};

/// Derived scalars. An empty optional means "undefined" (zero denominator),
/// which is never conflated with a measured 0.
struct MetricSet {
  std::optional<double> accuracy;
  std::optional<double> commit_acc;
  std::optional<double> approp_uncert;
  std::optional<double> coverage;
  std::optional<double> cvs;
  std::optional<double> miscommunication_ratio;

  bool operator==(const MetricSet&) const = default;
};

struct EpochSummary {
  int epoch = 1;
  double train_acc = 0.0;  // fraction
  double test_acc = 0.0;   // fraction
  std::optional<double> train_loss;
  std::optional<CertaintyValidityMatrix> matrix;
  std::optional<MetricSet> metrics;
};

struct Trajectory {
  std::vector<EpochSummary> epochs;
  std::string dataset_label;

  bool empty() const { return epochs.empty(); }
  std::size_t size() const { return epochs.size(); }
};

/// Thresholds shared by the analyses. Deltas are in percentage points.
struct AnalysisConfig {
  double certainty_threshold = 0.7;
  double spike_delta = 2.0;
  double collapse_delta = 10.0;
  double accuracy_tolerance = 0.5;
  // A recovered collapse counts as complete when the first post-collapse
  // epoch lands within this many points of the pre-collapse accuracy.
  double recovery_delta = 2.0;

  void validate() const {
    if (!(certainty_threshold > 0.0 && certainty_threshold < 1.0)) {
      throw InvalidArgument("certainty_threshold must lie in (0,1)");
    }
    if (!(spike_delta > 0.0) || !(collapse_delta > 0.0) ||
        !(accuracy_tolerance > 0.0) || !(recovery_delta > 0.0)) {
      throw InvalidArgument("analysis deltas must be strictly positive");
    }
  }
};

inline void validate_record(const PredictionRecord& r,
                            std::optional<std::int64_t> num_classes = {}) {
  if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
    throw InvalidArgument("confidence outside [0,1] for sample '" +
                          r.sample_id + "'");
  }
  if (r.predicted < 0 || r.actual < 0) {
    throw InvalidArgument("negative class index for sample '" + r.sample_id +
                          "'");
  }
  if (num_classes &&
      (r.predicted >= *num_classes || r.actual >= *num_classes)) {
    throw InvalidArgument("class index out of range for sample '" +
                          r.sample_id + "'");
  }
}

inline void validate_matrix(const CertaintyValidityMatrix& m) {
  if (m.cc < 0 || m.ci < 0 || m.uc < 0 || m.ui < 0) {
    throw InvalidArgument("matrix counts must be non-negative");
  }
}

/// Checks ordering and per-epoch bounds; throws InvalidArgument.
inline void validate_trajectory(const Trajectory& t) {
  if (t.epochs.empty()) throw InvalidArgument("trajectory is empty");
  int prev = 0;
  for (const auto& e : t.epochs) {
    if (e.epoch < 1) throw InvalidArgument("epoch numbers start at 1");
    if (e.epoch <= prev) {
      throw InvalidArgument("epoch " + std::to_string(e.epoch) +
                            " does not follow epoch " + std::to_string(prev));
    }
    prev = e.epoch;
    if (e.matrix) validate_matrix(*e.matrix);
    if (e.train_loss && *e.train_loss < 0.0) {
      throw InvalidArgument("negative training loss");
    }
  }
}

}  // namespace cvs

#endif  // CVSKIT_DATAMODEL_HPP
