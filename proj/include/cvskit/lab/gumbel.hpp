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

#ifndef CVSKIT_LAB_GUMBEL_HPP
#define CVSKIT_LAB_GUMBEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "cvskit/datamodel.hpp"

namespace cvs::lab {

using StateVec = std::array<double, 3>;  // ordered -W, 0, +W

/// softmax((logits + noise) / tau), evaluated with the max subtracted.
inline StateVec gumbel_softmax_select(const StateVec& logits, double tau,
                                      const StateVec& noise) {
  if (!(tau > 0.0)) throw InvalidArgument("gumbel_softmax_select: tau <= 0");
  StateVec z{};
  for (int i = 0; i < 3; ++i) z[i] = (logits[i] + noise[i]) / tau;
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : z) v /= sum;
  return z;
}

/// Standard Gumbel(0,1) draw.
template <typename Rng>
double sample_gumbel(Rng& rng) {
  std::uniform_real_distribution<double> u(
      std::numeric_limits<double>::min(), 1.0);
  return -std::log(-std::log(u(rng)));
}

/// Index of the hard-selected state. Ties resolve toward the zero state,
/// then toward -W.
inline int hard_select(const StateVec& logits) {
  int best = 1;
  for (int i : {0, 2}) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

}  // namespace cvs::lab

#endif  // CVSKIT_LAB_GUMBEL_HPP
