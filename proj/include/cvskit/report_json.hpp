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

#ifndef CVSKIT_REPORT_JSON_HPP
#define CVSKIT_REPORT_JSON_HPP

// JSON views of the analysis results. Undefined metrics become null rather
// than being dropped, so every report has a fixed set of keys.

#include <optional>
#include <string>
#include <vector>

#include "cvskit/datamodel.hpp"
#include "cvskit/lab/experiment.hpp"
#include "cvskit/routing.hpp"
#include "cvskit/trajectory.hpp"
#include "json.hpp"

namespace cvs {

using Json = nlohmann::ordered_json;

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json to_json(const CertaintyValidityMatrix& m) {
  return Json{{"cc", m.cc}, {"ci", m.ci}, {"uc", m.uc}, {"ui", m.ui},
              {"total", m.total()}};
}

inline Json to_json(const MetricSet& s) {
  return Json{{"accuracy", opt(s.accuracy)},
              {"commit_acc", opt(s.commit_acc)},
              {"approp_uncert", opt(s.approp_uncert)},
              {"coverage", opt(s.coverage)},
              {"cvs", opt(s.cvs)},
              {"miscommunication_ratio", opt(s.miscommunication_ratio)}};
}

inline Json to_json(const MigrationReport& r) {
  return Json{{"from_epoch", r.from_epoch},
              {"to_epoch", r.to_epoch},
              {"delta_cc", r.delta_cc},
              {"delta_ci", r.delta_ci},
              {"delta_uc", r.delta_uc},
              {"delta_ui", r.delta_ui},
              {"delta_approp_uncert", opt(r.delta_approp_uncert)},
              {"delta_cvs", opt(r.delta_cvs)},
              {"delta_accuracy", opt(r.delta_accuracy)},
              {"migration", r.migration_flag}};
}

inline Json to_json(const CollapseEvent& e) {
  return Json{{"onset_epoch", e.onset_epoch},
              {"pre_collapse_acc", e.pre_collapse_acc * 100.0},
              {"depth", e.depth * 100.0},
              {"duration", e.duration},
              {"recovered", e.recovered},
              {"recovery_epoch", opt(e.recovery_epoch)},
              {"recovery_acc", e.recovery_acc ? Json(*e.recovery_acc * 100.0)
                                              : Json(nullptr)},
              {"quality", std::string(to_string(e.quality))}};
}

/// Accuracies are reported in percent, matching the gap units.
inline Json to_json(const StabilityReport& r) {
  Json events = Json::array();
  for (const auto& e : r.collapses) events.push_back(to_json(e));
  return Json{
      {"epoch1_gap", opt(r.epoch1_gap)},
      {"peak_test_acc", r.peak_test_acc * 100.0},
      {"peak_epoch", r.peak_epoch},
      {"collapse_depth",
       r.collapse_depth ? Json(*r.collapse_depth * 100.0) : Json(nullptr)},
      {"collapse_duration", opt(r.collapse_duration)},
      {"recovery", r.recovery ? Json(std::string(to_string(*r.recovery)))
                              : Json(nullptr)},
      {"collapses", std::move(events)}};
}

inline Json to_json(const RoutingReport& r) {
  return Json{{"automated_count", r.automated_count},
              {"review_count", r.review_count},
              {"automated_accuracy", opt(r.automated_accuracy)},
              {"review_fraction", r.review_fraction},
              {"baseline_accuracy", r.baseline_accuracy}};
}

inline Json to_json(const HypothesisReport& r) {
  return Json{{"ui_share", r.ui_share},
              {"verdict", std::string(to_string(r.verdict))}};
}

inline Json to_json(const lab::SweepRow& r) {
  return Json{{"tau", r.tau},
              {"best_epoch", r.best_epoch},
              {"best_accuracy", r.best_accuracy},
              {"best_epoch_cvs", opt(r.best_epoch_cvs)},
              {"plateau_accuracy", r.plateau_accuracy},
              {"plateau_cvs", opt(r.plateau_cvs)}};
}

}  // namespace cvs

#endif  // CVSKIT_REPORT_JSON_HPP
