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

#include "sisaug/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sisaug {
namespace {

void check_finite(LogitField values, const char* what) {
  if (values.empty()) throw Error(std::string(what) + " is empty");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(std::string(what) + " contains non-finite values");
  }
}

template <class F>
double mean_of(LogitField values, F&& f) {
  double sum = 0.0;
  for (double v : values) sum += f(v);
  return sum / static_cast<double>(values.size());
}

double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error("feature layer shape mismatch");
  if (a.empty()) throw Error("feature layer is empty");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return sum / static_cast<double>(a.size());
}

void check_stacks(const FeatureStack& real, const FeatureStack& fake) {
  if (real.layers.size() != fake.layers.size()) throw Error("feature stack layer count mismatch");
}

}  // namespace

BaselineProfile baseline_profile(std::string_view name) {
  if (name == "pix2pixhd") return {AdversarialMode::kLeastSquares, {10.0, 10.0, 10.0}};
  if (name == "spade") return {AdversarialMode::kHinge, {10.0, 10.0, 10.0}};
  if (name == "cc-fpse") return {AdversarialMode::kHinge, {20.0, 10.0, 10.0}};
  throw Error("unknown baseline profile: " + std::string(name));
}

double edge_loss(const EdgeMap& e_real, const EdgeMap& e_fake, EdgeLossReduction reduction) {
  if (e_real.width() != e_fake.width() || e_real.height() != e_fake.height()) {
    throw Error("edge map dimensions differ");
  }
  double sq = 0.0;
  auto a = e_real.data();
  auto b = e_fake.data();
  for (std::size_t k = 0; k < a.size(); ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
  return reduction == EdgeLossReduction::kL2Norm ? std::sqrt(sq)
                                                 : sq / static_cast<double>(a.size());
}

double adversarial_loss(std::optional<LogitField> d_real, LogitField d_fake, Side side,
                        AdversarialMode mode, const AdversarialOptions& options) {
  check_finite(d_fake, "d_fake");
  if (side == Side::kDiscriminator) {
    if (!d_real) throw Error("discriminator loss requires d_real");
    check_finite(*d_real, "d_real");
  }

  switch (mode) {
    case AdversarialMode::kLog: {
      const double eps = options.epsilon;
      auto prob = [&](double v) {
        const double p = options.inputs_are_probabilities ? v : 1.0 / (1.0 + std::exp(-v));
        return std::clamp(p, eps, 1.0 - eps);
      };
      if (side == Side::kGenerator) {
        return -mean_of(d_fake, [&](double v) { return std::log(prob(v)); });
      }
      return -mean_of(*d_real, [&](double v) { return std::log(prob(v)); }) -
             mean_of(d_fake, [&](double v) { return std::log(1.0 - prob(v)); });
    }
    case AdversarialMode::kHinge:
      if (side == Side::kGenerator) return -mean_of(d_fake, [](double v) { return v; });
      return -mean_of(*d_real, [](double v) { return std::min(0.0, -1.0 + v); }) -
             mean_of(d_fake, [](double v) { return std::min(0.0, -1.0 - v); });
    case AdversarialMode::kLeastSquares:
      if (side == Side::kGenerator) {
        return 0.5 * mean_of(d_fake, [](double v) { return (v - 1.0) * (v - 1.0); });
      }
      return 0.5 * mean_of(*d_real, [](double v) { return (v - 1.0) * (v - 1.0); }) +
             0.5 * mean_of(d_fake, [](double v) { return v * v; });
  }
  return 0.0;
}

double feature_matching_loss(const FeatureStack& real, const FeatureStack& fake) {
  check_stacks(real, fake);
  if (real.layers.empty()) throw Error("feature stack is empty");
  double sum = 0.0;
  for (std::size_t l = 0; l < real.layers.size(); ++l) {
    sum += mean_abs_diff(real.layers[l], fake.layers[l]);
  }
  return sum / static_cast<double>(real.layers.size());
}

double perceptual_loss(const FeatureStack& real, const FeatureStack& fake,
                       std::span<const double> layer_weights) {
  check_stacks(real, fake);
  if (layer_weights.size() != real.layers.size()) {
    throw Error("perceptual layer weight count mismatch");
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < real.layers.size(); ++l) {
    sum += layer_weights[l] * mean_abs_diff(real.layers[l], fake.layers[l]);
  }
  return sum;
}

double total_generator_loss(double adv, double fm, double p, double e, const LossWeights& w) {
  return adv + w.lambda_fm * fm + w.lambda_p * p + w.lambda_e * e;
}

}  // namespace sisaug
