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

#ifndef CVSKIT_LAB_OPTIMIZER_HPP
#define CVSKIT_LAB_OPTIMIZER_HPP

#include <cmath>
#include <vector>

#include "cvskit/datamodel.hpp"
#include "cvskit/lab/ternary_net.hpp"

namespace cvs::lab {

/// Three learning rates scaled from a base rate by batch_scale = batch/8:
/// coarse = base * s^0.5, triadic = base * s^0.3, fine = base * s^0.2.
/// A batch of 8 collapses all three to the base rate.
struct FractalBands {
  double coarse_lr = 0.0;
  double triadic_lr = 0.0;
  double fine_lr = 0.0;

  double rate(Band b) const {
    switch (b) {
      case Band::Coarse: return coarse_lr;
      case Band::Triadic: return triadic_lr;
      case Band::Fine: return fine_lr;
    }
    return 0.0;
  }
};

inline FractalBands fractal_lr_bands(double base_lr, int batch_size) {
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (!(base_lr > 0.0)) throw InvalidArgument("base_lr must be positive");
  const double scale = static_cast<double>(batch_size) / 8.0;
  return {base_lr * std::pow(scale, 0.5), base_lr * std::pow(scale, 0.3),
          base_lr * std::pow(scale, 0.2)};
}

/// Adam moments for every selection logit. The step size of each layer is
/// its band's rate.
struct OptimizerState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerState for_network(const TernaryNetwork& net) {
    OptimizerState s;
    for (const auto& l : net.layers) {
      s.m.emplace_back(l.logits.size(), 0.0);
      s.v.emplace_back(l.logits.size(), 0.0);
    }
    return s;
  }
};

inline void apply_update(TernaryNetwork& net, OptimizerState& opt,
                         const Gradients& grads, const FractalBands& bands) {
  ++opt.step;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    const double lr = bands.rate(layer.band);
    auto& m = opt.m[l];
    auto& v = opt.v[l];
    const auto& g = grads[l];
    for (std::size_t k = 0; k < layer.logits.size(); ++k) {
      m[k] = opt.beta1 * m[k] + (1.0 - opt.beta1) * g[k];
      v[k] = opt.beta2 * v[k] + (1.0 - opt.beta2) * g[k] * g[k];
      layer.logits[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + opt.eps);
    }
  }
}

}  // namespace cvs::lab

#endif  // CVSKIT_LAB_OPTIMIZER_HPP
