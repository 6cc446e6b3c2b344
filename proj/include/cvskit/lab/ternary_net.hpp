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

// A minimal discrete-commitment network. Every connection selects one of
// three committed states {-W, 0, +W} through Gumbel-Softmax over its own
// three logits. Hidden layers use tanh; the output layer is linear followed
// by a softmax over classes. There are no biases, so a network whose
// connections all sit in the zero state outputs the uniform prior.
//
// Soft mode uses the relaxed mixture w = W * (p[+W] - p[-W]); hard mode
// snaps every connection to its argmax state.

#ifndef CVSKIT_LAB_TERNARY_NET_HPP
#define CVSKIT_LAB_TERNARY_NET_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "cvskit/datamodel.hpp"
#include "cvskit/lab/gumbel.hpp"

namespace cvs::lab {

enum class Band { Coarse, Triadic, Fine };

inline std::string_view to_string(Band b) {
  switch (b) {
    case Band::Coarse: return "coarse";
    case Band::Triadic: return "triadic";
    case Band::Fine: return "fine";
  }
  return "?";
}

/// Depth-wise band assignment: first layer coarse, output layer fine,
/// everything between triadic.
inline Band band_for_layer(std::size_t index, std::size_t n_layers) {
  if (index == 0) return Band::Coarse;
  if (index + 1 == n_layers) return Band::Fine;
  return Band::Triadic;
}

struct TernaryLayer {
  int in = 0;
  int out = 0;
  double magnitude = 1.0;
  Band band = Band::Coarse;
  // Selection logits, index ((o * in) + i) * 3 + s with s = 0,1,2 for
  // states -W, 0, +W.
  std::vector<double> logits;

  std::size_t connections() const {
    return static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
  }
  StateVec state_logits(std::size_t c) const {
    return {logits[3 * c], logits[3 * c + 1], logits[3 * c + 2]};
  }
  /// Effective weight of connection c after hard selection.
  double hard_weight(std::size_t c) const {
    return (hard_select(state_logits(c)) - 1) * magnitude;
  }
};

struct TernaryNetwork {
  std::vector<TernaryLayer> layers;

  int input_dim() const { return layers.front().in; }
  int num_classes() const { return layers.back().out; }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.logits.size();
    return n;
  }
};

/// Builds a network with widths sizes[0] -> ... -> sizes.back(). Logits start
/// near zero with the zero state favored by `zero_bias`.
template <typename Rng>
TernaryNetwork make_network(std::span<const int> sizes, double magnitude,
                            double zero_bias, Rng& rng) {
  if (sizes.size() < 2) throw InvalidArgument("network needs >= 2 widths");
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  TernaryNetwork net;
  const std::size_t n_layers = sizes.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    TernaryLayer layer;
    layer.in = sizes[l];
    layer.out = sizes[l + 1];
    if (layer.in < 1 || layer.out < 1) {
      throw InvalidArgument("layer widths must be positive");
    }
    layer.magnitude = magnitude;
    layer.band = band_for_layer(l, n_layers);
    layer.logits.resize(layer.connections() * 3);
    for (std::size_t k = 0; k < layer.logits.size(); ++k) {
      layer.logits[k] = jitter(rng) + (k % 3 == 1 ? zero_bias : 0.0);
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

/// Gumbel noise for every state logit in the network, same layout as the
/// logits. An empty set means zero noise.
using NoiseSet = std::vector<std::vector<double>>;

template <typename Rng>
NoiseSet sample_noise(const TernaryNetwork& net, Rng& rng) {
  NoiseSet noise;
  noise.reserve(net.layers.size());
  for (const auto& l : net.layers) {
    std::vector<double> n(l.logits.size());
    for (auto& v : n) v = sample_gumbel(rng);
    noise.push_back(std::move(n));
  }
  return noise;
}

enum class Mode { Soft, Hard };

/// Per-layer effective weights (out x in, row-major) and, in soft mode, the
/// state probabilities needed for backpropagation.
struct EffectiveWeights {
  std::vector<std::vector<double>> w;
  std::vector<std::vector<StateVec>> probs;  // soft mode only
  double zero_fraction = 0.0;  // share of connections in the zero state
};

inline EffectiveWeights effective_weights(const TernaryNetwork& net, Mode mode,
                                          double tau,
                                          const NoiseSet& noise = {}) {
  EffectiveWeights ew;
  double zero_mass = 0.0;
  std::size_t total = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    std::vector<double> w(layer.connections());
    std::vector<StateVec> probs;
    if (mode == Mode::Soft) probs.resize(layer.connections());
    for (std::size_t c = 0; c < layer.connections(); ++c) {
      const StateVec lg = layer.state_logits(c);
      if (mode == Mode::Hard) {
        const int s = hard_select(lg);
        w[c] = (s - 1) * layer.magnitude;
        zero_mass += s == 1 ? 1.0 : 0.0;
      } else {
        StateVec g{};
        if (!noise.empty()) {
          g = {noise[l][3 * c], noise[l][3 * c + 1], noise[l][3 * c + 2]};
        }
        const StateVec p = gumbel_softmax_select(lg, tau, g);
        probs[c] = p;
        w[c] = layer.magnitude * (p[2] - p[0]);
        zero_mass += p[1];
      }
    }
    total += layer.connections();
    ew.w.push_back(std::move(w));
    ew.probs.push_back(std::move(probs));
  }
  ew.zero_fraction = total ? zero_mass / static_cast<double>(total) : 0.0;
  return ew;
}

/// Activations of every layer for one input; acts[0] is the input and
/// acts.back() holds the class probabilities.
struct Activations {
  std::vector<std::vector<double>> acts;
  std::vector<double> logits;  // pre-softmax class scores
};

inline Activations propagate(const TernaryNetwork& net,
                             const EffectiveWeights& ew,
                             std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.input_dim()) {
    throw InvalidArgument("input dimension mismatch");
  }
  Activations a;
  a.acts.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const auto& in = a.acts.back();
    std::vector<double> z(layer.out, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* wr = ew.w[l].data() + static_cast<std::size_t>(o) * layer.in;
      double s = 0.0;
      for (int i = 0; i < layer.in; ++i) s += wr[i] * in[i];
      z[o] = s;
    }
    if (l + 1 < net.layers.size()) {
      for (auto& v : z) v = std::tanh(v);
      a.acts.push_back(std::move(z));
    } else {
      a.logits = z;
      const double mx = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (auto& v : z) {
        v = std::exp(v - mx);
        sum += v;
      }
      for (auto& v : z) v /= sum;
      a.acts.push_back(std::move(z));
    }
  }
  return a;
}

struct ForwardResult {
  std::vector<double> class_scores;  // probabilities
  int predicted = 0;
  double confidence = 0.0;  // max class probability
  bool committed = false;
  double zero_fraction = 0.0;
};

struct CommitmentRule {
  double threshold = 0.7;
  double zero_state_cap = 0.0;  // 0 disables
};

inline ForwardResult summarize(const Activations& a, double zero_fraction,
                               const CommitmentRule& rule) {
  ForwardResult r;
  r.class_scores = a.acts.back();
  const auto it = std::max_element(r.class_scores.begin(), r.class_scores.end());
  r.predicted = static_cast<int>(it - r.class_scores.begin());
  r.confidence = *it;
  r.zero_fraction = zero_fraction;
  r.committed =
      r.confidence >= rule.threshold || zero_fraction < rule.zero_state_cap;
  return r;
}

inline ForwardResult forward(const TernaryNetwork& net,
                             std::span<const double> x, double tau, Mode mode,
                             const CommitmentRule& rule = {},
                             const NoiseSet& noise = {}) {
  if (mode == Mode::Soft && !(tau > 0.0)) throw InvalidArgument("tau <= 0");
  const auto ew = effective_weights(net, mode, tau, noise);
  return summarize(propagate(net, ew, x), ew.zero_fraction, rule);
}

/// Gradient buffers with the same layout as the network logits.
using Gradients = std::vector<std::vector<double>>;

inline Gradients zero_gradients(const TernaryNetwork& net) {
  Gradients g;
  for (const auto& l : net.layers) g.emplace_back(l.logits.size(), 0.0);
  return g;
}

struct BatchResult {
  double loss = 0.0;  // mean cross-entropy
  int correct = 0;
};

/// Soft-mode mean cross-entropy over a batch and, when `grads` is non-null,
/// its gradient with respect to every selection logit (accumulated into
/// `grads`). Noise is held fixed across the batch.
inline BatchResult soft_loss_and_gradient(
    const TernaryNetwork& net, std::span<const double> features,
    std::span<const int> labels, double tau, const NoiseSet& noise,
    Gradients* grads) {
  const auto n = labels.size();
  const auto d = static_cast<std::size_t>(net.input_dim());
  if (features.size() != n * d) throw InvalidArgument("batch shape mismatch");
  const auto ew = effective_weights(net, Mode::Soft, tau, noise);
  const std::size_t L = net.layers.size();

  std::vector<std::vector<double>> dw(L);
  if (grads) {
    for (std::size_t l = 0; l < L; ++l) dw[l].assign(ew.w[l].size(), 0.0);
  }

  BatchResult br;
  for (std::size_t s = 0; s < n; ++s) {
    const auto a = propagate(net, ew, features.subspan(s * d, d));
    const auto& p = a.acts.back();
    const int y = labels[s];
    if (y < 0 || y >= net.num_classes()) {
      throw InvalidArgument("label out of range");
    }
    // log-softmax for a stable loss
    const double mx = *std::max_element(a.logits.begin(), a.logits.end());
    double lse = 0.0;
    for (double v : a.logits) lse += std::exp(v - mx);
    br.loss += -(a.logits[y] - mx - std::log(lse));
    const auto pred = std::max_element(p.begin(), p.end()) - p.begin();
    br.correct += pred == y ? 1 : 0;
    if (!grads) continue;

    std::vector<double> delta(p.begin(), p.end());  // dL/dz at the output
    delta[y] -= 1.0;
    for (std::size_t l = L; l-- > 0;) {
      const auto& layer = net.layers[l];
      const auto& in = a.acts[l];
      for (int o = 0; o < layer.out; ++o) {
        double* row = dw[l].data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) row[i] += delta[o] * in[i];
      }
      if (l == 0) break;
      std::vector<double> prev(layer.in, 0.0);
      for (int o = 0; o < layer.out; ++o) {
        const double* wr = ew.w[l].data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) prev[i] += wr[i] * delta[o];
      }
      for (int i = 0; i < layer.in; ++i) prev[i] *= 1.0 - in[i] * in[i];
      delta = std::move(prev);
    }
  }
  const double inv_n = n ? 1.0 / static_cast<double>(n) : 0.0;
  br.loss *= inv_n;
  if (grads) {
    // w = W (p+ - p-), dp_j/dlogit_k = p_j (delta_jk - p_k) / tau
    for (std::size_t l = 0; l < L; ++l) {
      const double W = net.layers[l].magnitude;
      auto& g = (*grads)[l];
      for (std::size_t c = 0; c < ew.w[l].size(); ++c) {
        const StateVec& pr = ew.probs[l][c];
        const double gw = dw[l][c] * inv_n;
        const StateVec v{-W * gw, 0.0, W * gw};
        const double vbar = pr[0] * v[0] + pr[2] * v[2];
        for (int k = 0; k < 3; ++k) {
          g[3 * c + k] += pr[k] * (v[k] - vbar) / tau;
        }
      }
    }
  }
  return br;
}

}  // namespace cvs::lab

#endif  // CVSKIT_LAB_TERNARY_NET_HPP
