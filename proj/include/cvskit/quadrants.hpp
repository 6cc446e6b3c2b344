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

#ifndef CVSKIT_QUADRANTS_HPP
#define CVSKIT_QUADRANTS_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "cvskit/datamodel.hpp"

namespace cvs {

enum class Quadrant { CC, CI, UC, UI };

inline std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::CC: return "CC";
    case Quadrant::CI: return "CI";
    case Quadrant::UC: return "UC";
    case Quadrant::UI: return "UI";
  }
  return "?";
}

/// A record is certain when its explicit commitment flag says so or, lacking
/// one, when confidence >= threshold. Ties at the threshold count as certain.
inline bool is_certain(const PredictionRecord& r, double threshold) {
  if (r.committed) return *r.committed;
  return r.confidence >= threshold;
}

inline Quadrant classify_record(const PredictionRecord& r,
                                const AnalysisConfig& config) {
  const bool certain = is_certain(r, config.certainty_threshold);
  const bool valid = r.predicted == r.actual;
  if (certain) return valid ? Quadrant::CC : Quadrant::CI;
  return valid ? Quadrant::UC : Quadrant::UI;
}

inline void add_to(CertaintyValidityMatrix& m, Quadrant q) {
  switch (q) {
    case Quadrant::CC: ++m.cc; break;
    case Quadrant::CI: ++m.ci; break;
    case Quadrant::UC: ++m.uc; break;
    case Quadrant::UI: ++m.ui; break;
  }
}

inline CertaintyValidityMatrix accumulate_matrix(
    std::span<const PredictionRecord> records, const AnalysisConfig& config) {
  CertaintyValidityMatrix m;
  for (const auto& r : records) add_to(m, classify_record(r, config));
  return m;
}

/// Cellwise sum. Associative and commutative, with the zero matrix as
/// identity, so chunked accumulation folds to the sequential result.
inline CertaintyValidityMatrix merge_matrices(const CertaintyValidityMatrix& a,
                                              const CertaintyValidityMatrix& b) {
  return {a.cc + b.cc, a.ci + b.ci, a.uc + b.uc, a.ui + b.ui};
}

inline CertaintyValidityMatrix operator+(const CertaintyValidityMatrix& a,
                                         const CertaintyValidityMatrix& b) {
  return merge_matrices(a, b);
}

/// Derives accuracy, CommitAcc, AppropUncert, Coverage, CVS and the
/// miscommunication ratio.
///
/// Zero-denominator conventions:
///  - total == 0: every metric is undefined.
///  - cc + ci == 0 (nothing committed): commit_acc and cvs are undefined.
///  - ci + ui == 0 (no errors): approp_uncert is 1 and the miscommunication
///    ratio 0, so cvs == commit_acc.
inline MetricSet derive_metrics(const CertaintyValidityMatrix& m) {
  validate_matrix(m);
  MetricSet out;
  const auto total = m.total();
  if (total == 0) return out;
  const double n = static_cast<double>(total);
  out.accuracy = static_cast<double>(m.cc + m.uc) / n;
  out.coverage = static_cast<double>(m.committed()) / n;
  if (m.errors() > 0) {
    const double err = static_cast<double>(m.errors());
    out.approp_uncert = static_cast<double>(m.ui) / err;
    out.miscommunication_ratio = static_cast<double>(m.ci) / err;
  } else {
    out.approp_uncert = 1.0;
    out.miscommunication_ratio = 0.0;
  }
  if (m.committed() > 0) {
    out.commit_acc =
        static_cast<double>(m.cc) / static_cast<double>(m.committed());
    out.cvs = *out.commit_acc * *out.approp_uncert;
  }
  return out;
}

/// Attaches derived metrics to every epoch that carries a matrix.
inline void attach_metrics(Trajectory& t) {
  for (auto& e : t.epochs) {
    if (e.matrix) e.metrics = derive_metrics(*e.matrix);
  }
}

}  // namespace cvs

#endif  // CVSKIT_QUADRANTS_HPP
