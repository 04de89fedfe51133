/* Copyright 2026 The sisaug Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SISAUG_OBJECTIVES_HPP_
#define SISAUG_OBJECTIVES_HPP_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sisaug/raster.hpp"

namespace sisaug {

// Flattened discriminator outputs.
using LogitField = std::span<const double>;

// Per-layer activations, each flattened. Paired stacks must agree in layer
// count and per-layer length.
struct FeatureStack {
  std::vector<std::vector<double>> layers;
};

struct LossWeights {
  double lambda_fm = 10.0;
  double lambda_p = 10.0;
  double lambda_e = 10.0;
};

enum class AdversarialMode { kLog, kHinge, kLeastSquares };
enum class Side { kGenerator, kDiscriminator };

// Generator weights and adversarial loss of a baseline model:
// "pix2pixhd" (least squares, FM 10, P 10), "spade" (hinge, FM 10, P 10),
// "cc-fpse" (hinge, FM 20, P 10). The edge-loss weight is 10 for all.
struct BaselineProfile {
  AdversarialMode mode;
  LossWeights weights;
};
BaselineProfile baseline_profile(std::string_view name);

enum class EdgeLossReduction {
  kL2Norm,       // sqrt(sum d^2)
  kMeanSquared,  // sum d^2 / n
};

double edge_loss(const EdgeMap& e_real, const EdgeMap& e_fake,
                 EdgeLossReduction reduction = EdgeLossReduction::kL2Norm);

struct AdversarialOptions {
  // Log mode only: inputs are probabilities in (0, 1) rather than logits.
  bool inputs_are_probabilities = false;
  double epsilon = 1e-7;
};

// Mean over all elements.
//   log:   D: -E[log D(x)] - E[log(1 - D(G))],  G: -E[log D(G)]
//   hinge: D: -E[min(0, -1 + D(x))] - E[min(0, -1 - D(G))],  G: -E[D(G)]
//   lsgan: D: E[(D(x) - 1)^2] / 2 + E[D(G)^2] / 2,  G: E[(D(G) - 1)^2] / 2
double adversarial_loss(std::optional<LogitField> d_real, LogitField d_fake, Side side,
                        AdversarialMode mode, const AdversarialOptions& options = {});

// Mean over layers of the per-layer mean absolute difference.
double feature_matching_loss(const FeatureStack& real, const FeatureStack& fake);

// sum_l w_l * mean |real_l - fake_l|.
double perceptual_loss(const FeatureStack& real, const FeatureStack& fake,
                       std::span<const double> layer_weights);

double total_generator_loss(double adv, double fm, double p, double e, const LossWeights& w);

}  // namespace sisaug

#endif  // SISAUG_OBJECTIVES_HPP_
