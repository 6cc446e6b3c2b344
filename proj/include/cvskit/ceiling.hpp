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

#ifndef CVSKIT_CEILING_HPP
#define CVSKIT_CEILING_HPP

#include "cvskit/datamodel.hpp"

namespace cvs {

/// Plateau accuracy as a mixture of a clean population, classified at
/// clean_acc, and an ambiguous population, classified at chance:
///
///   plateau = p_clean * clean_acc + (1 - p_clean) * chance
///
/// With p_clean = 0.83 the plateau is 0.83 only when chance is 0; a chance
/// level of 0.4 gives 0.898.
struct CeilingModel {
  double p_clean = 1.0;
  double clean_acc = 1.0;
  double chance = 0.5;

  double p_ambig() const { return 1.0 - p_clean; }

  void validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(p_clean) || !unit(clean_acc) || !unit(chance)) {
      throw InvalidArgument("ceiling parameters must be fractions in [0,1]");
    }
  }
};

inline double predicted_plateau(const CeilingModel& m) {
  m.validate();
  return m.p_clean * m.clean_acc + m.p_ambig() * m.chance;
}

/// Inverts predicted_plateau for p_clean.
inline double fit_clean_fraction(double observed_plateau, double clean_acc,
                                 double chance) {
  if (!(clean_acc > chance)) {
    throw InvalidArgument("degenerate ceiling: clean_acc must exceed chance");
  }
  if (!(observed_plateau >= chance && observed_plateau <= clean_acc)) {
    throw InvalidArgument("plateau out of range [chance, clean_acc]");
  }
  return (observed_plateau - chance) / (clean_acc - chance);
}

}  // namespace cvs

#endif  // CVSKIT_CEILING_HPP
