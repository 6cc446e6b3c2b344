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

#ifndef CVSKIT_LAB_CONFIG_HPP
#define CVSKIT_LAB_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <string>

#include "cvskit/datamodel.hpp"
#include "json.hpp"

namespace cvs::lab {

/// Parameters of one synthetic experiment. Every field has a default, so a
/// JSON config only needs the keys it changes.
struct LabConfig {
  int n_train = 1000;
  int n_test = 2000;
  int n_features = 16;
  double ambiguity_fraction = 0.2;  // share of ambiguous samples
  double ambiguous_signal = 0.5;    // Bayes accuracy on ambiguous samples
  double cluster_separation = 3.0;  // clean cluster centers at +/- this on axis 0
  int hidden_width = 32;
  int hidden_layers = 1;
  double tau = 0.8;
  double weight_magnitude = 0.5;
  double base_lr = 0.03;
  int batch_size = 32;
  int epochs = 30;
  std::uint64_t seed = 1;
  double certainty_threshold = 0.7;
  // A prediction also counts as committed when the network's zero-state
  // fraction falls below this cap; 0 disables the structural signal.
  double zero_state_cap = 0.0;
  // Initial preference for the zero (withheld) state.
  double init_zero_bias = 1.0;

  void validate() const {
    if (n_train < 1 || n_test < 1 || n_features < 2) {
      throw InvalidArgument("lab: sample counts >= 1 and n_features >= 2");
    }
    if (!(ambiguity_fraction >= 0.0 && ambiguity_fraction <= 1.0)) {
      throw InvalidArgument("lab: ambiguity_fraction must lie in [0,1]");
    }
    if (!(ambiguous_signal >= 0.5 && ambiguous_signal <= 1.0)) {
      throw InvalidArgument("lab: ambiguous_signal must lie in [0.5,1]");
    }
    if (!(tau > 0.0)) throw InvalidArgument("lab: tau must be positive");
    if (!(weight_magnitude > 0.0)) {
      throw InvalidArgument("lab: weight_magnitude must be positive");
    }
    if (!(base_lr > 0.0)) throw InvalidArgument("lab: base_lr must be positive");
    if (batch_size < 1 || epochs < 0 || hidden_width < 1 || hidden_layers < 1) {
      throw InvalidArgument("lab: batch_size, hidden sizes >= 1; epochs >= 0");
    }
    if (!(certainty_threshold > 0.0 && certainty_threshold < 1.0)) {
      throw InvalidArgument("lab: certainty_threshold must lie in (0,1)");
    }
    if (!(cluster_separation > 0.0)) {
      throw InvalidArgument("lab: cluster_separation must be positive");
    }
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    LabConfig, n_train, n_test, n_features, ambiguity_fraction,
    ambiguous_signal, cluster_separation, hidden_width, hidden_layers, tau,
    weight_magnitude, base_lr, batch_size, epochs, seed, certainty_threshold,
    zero_state_cap, init_zero_bias)

inline LabConfig lab_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("lab config must be a JSON object");
  const nlohmann::json defaults = LabConfig{};
  for (const auto& [key, _] : j.items()) {
    if (!defaults.contains(key)) {
      throw ParseError("unknown lab config key '" + key + "'");
    }
  }
  LabConfig c;
  try {
    c = j.get<LabConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad lab config: ") + e.what());
  }
  c.validate();
  return c;
}

inline LabConfig load_lab_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return lab_config_from_json(j);
}

}  // namespace cvs::lab

#endif  // CVSKIT_LAB_CONFIG_HPP
