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

#ifndef CVSKIT_ROUTING_HPP
#define CVSKIT_ROUTING_HPP

#include <cstdint>
#include <optional>

#include "cvskit/datamodel.hpp"
#include "cvskit/quadrants.hpp"

namespace cvs {

/// Deployment split: committed predictions are processed automatically,
/// uncertain ones go to review. No post-review accuracy is modeled.
struct RoutingReport {
  std::int64_t automated_count = 0;
  std::int64_t review_count = 0;
  std::optional<double> automated_accuracy;  // undefined if nothing commits
  double review_fraction = 0.0;
  double baseline_accuracy = 0.0;
};

inline RoutingReport simulate_routing(const CertaintyValidityMatrix& m) {
  validate_matrix(m);
  if (m.total() == 0) throw InvalidArgument("routing needs a non-empty matrix");
  const auto metrics = derive_metrics(m);
  RoutingReport r;
  r.automated_count = m.committed();
  r.review_count = m.uncertain();
  r.automated_accuracy = metrics.commit_acc;
  r.review_fraction =
      static_cast<double>(m.uncertain()) / static_cast<double>(m.total());
  r.baseline_accuracy = *metrics.accuracy;
  return r;
}

}  // namespace cvs

#endif  // CVSKIT_ROUTING_HPP
