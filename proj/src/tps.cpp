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

#include "sisaug/tps.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sisaug/rng.hpp"

namespace sisaug {
namespace {

// Pivots below this fraction of the largest one mark the system singular.
constexpr double kSingularThreshold = 1e-12;

// Stream ids separating the sampling and jitter draws of one seed.
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kJitterStream = 2;

}  // namespace

TpsTransform::TpsTransform(KeyPointSet control_points, Affine affine,
                           std::vector<Weight> weights, double lambda_reg)
    : control_points_(std::move(control_points)),
      affine_(affine),
      weights_(std::move(weights)),
      lambda_reg_(lambda_reg) {
  if (control_points_.size() != weights_.size()) {
    throw Error("TPS weights and control points differ in length");
  }
}

TpsTransform TpsTransform::identity() { return TpsTransform(); }

Point TpsTransform::operator()(Point p) const {
  double out[2];
  for (int d = 0; d < 2; ++d) {
    out[d] = affine_[d][0] * p.u + affine_[d][1] * p.v + affine_[d][2];
  }
  for (std::size_t k = 0; k < control_points_.size(); ++k) {
    const double du = p.u - control_points_[k].u;
    const double dv = p.v - control_points_[k].v;
    const double kern = tps_kernel(du * du + dv * dv);
    out[0] += weights_[k][0] * kern;
    out[1] += weights_[k][1] * kern;
  }
  return {out[0], out[1]};
}

KeyPointSet sample_boundary_keypoints(const EdgeMap& edge, int n, double tau,
                                      std::uint64_t seed) {
  if (n < 1) throw Error("keypoint count must be >= 1");
  std::vector<Point> candidates;
  for (int y = 0; y < edge.height(); ++y) {
    for (int x = 0; x < edge.width(); ++x) {
      if (edge(x, y) >= tau) candidates.push_back({double(x), double(y)});
    }
  }
  if (candidates.empty()) throw NoBoundaryError();
  Rng rng(seed);
  KeyPointSet points;
  points.reserve(n);
  for (int i = 0; i < n; ++i) points.push_back(candidates[rng.index(candidates.size())]);
  return points;
}

KeyPointSet jitter_keypoints(const KeyPointSet& fixed, double max_shift,
                             std::uint64_t seed, int width, int height) {
  if (!(max_shift >= 0.0)) throw Error("max shift must be >= 0");
  if (max_shift == 0.0) return fixed;
  KeyPointSet moving;
  moving.reserve(fixed.size());
  Rng rng(seed);
  const double max_u = width - 1;
  const double max_v = height - 1;
  for (const Point& p : fixed) {
    const double du = rng.uniform(-max_shift, max_shift);
    const double dv = rng.uniform(-max_shift, max_shift);
    moving.push_back({std::clamp(p.u + du, 0.0, max_u), std::clamp(p.v + dv, 0.0, max_v)});
  }
  return moving;
}

TpsTransform fit_tps(const KeyPointSet& fixed, const KeyPointSet& moving,
                     double lambda_reg) {
  if (fixed.size() != moving.size()) {
    throw Error("fixed and moving keypoint sets differ in size");
  }
  if (fixed.size() < 3) throw Error("TPS fit needs at least 3 control points");
  if (!(lambda_reg >= 0.0)) throw Error("lambda_reg must be >= 0");

  const Eigen::Index n = static_cast<Eigen::Index>(fixed.size());
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 3, n + 3);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 3, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double du = fixed[i].u - fixed[j].u;
      const double dv = fixed[i].v - fixed[j].v;
      system(i, j) = system(j, i) = tps_kernel(du * du + dv * dv);
    }
    system(i, i) = lambda_reg;
    system(i, n) = system(n, i) = 1.0;
    system(i, n + 1) = system(n + 1, i) = fixed[i].u;
    system(i, n + 2) = system(n + 2, i) = fixed[i].v;
    rhs(i, 0) = moving[i].u;
    rhs(i, 1) = moving[i].v;
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(kSingularThreshold);
  if (!lu.isInvertible()) throw DegenerateControlPointsError();
  const Eigen::MatrixXd solution = lu.solve(rhs);
  if (!solution.allFinite()) throw DegenerateControlPointsError();

  std::vector<TpsTransform::Weight> weights(n);
  for (Eigen::Index i = 0; i < n; ++i) weights[i] = {solution(i, 0), solution(i, 1)};
  TpsTransform::Affine affine;
  for (int d = 0; d < 2; ++d) {
    affine[d] = {solution(n + 1, d), solution(n + 2, d), solution(n, d)};
  }
  return TpsTransform(fixed, affine, std::move(weights), lambda_reg);
}

Point evaluate_tps(const TpsTransform& t, Point p) { return t(p); }

double bending_energy(const TpsTransform& t) {
  const auto& cps = t.control_points();
  const auto& w = t.weights();
  double energy = 0.0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    for (std::size_t j = 0; j < cps.size(); ++j) {
      const double du = cps[i].u - cps[j].u;
      const double dv = cps[i].v - cps[j].v;
      const double kern = tps_kernel(du * du + dv * dv);
      energy += kern * (w[i][0] * w[j][0] + w[i][1] * w[j][1]);
    }
  }
  return energy;
}

LabelMap warp_label_map(const LabelMap& label, const TpsTransform& t, BorderMode border) {
  if (border == BorderMode::kIgnoreFill && !label.ignore_id()) {
    throw Error("ignore-fill border requires a label map with an ignore id");
  }
  const int w = label.width();
  const int h = label.height();
  std::vector<ClassId> out(label.pixel_count());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Point src = t({double(x), double(y)});
      // Round half up, matching the 8-bit quantizer.
      const double su = std::floor(src.u + 0.5);
      const double sv = std::floor(src.v + 0.5);
      ClassId id;
      if (su >= 0 && sv >= 0 && su < w && sv < h) {
        id = label(static_cast<int>(su), static_cast<int>(sv));
      } else if (border == BorderMode::kClamp) {
        const int cu = static_cast<int>(std::clamp(su, 0.0, double(w - 1)));
        const int cv = static_cast<int>(std::clamp(sv, 0.0, double(h - 1)));
        id = label(cu, cv);
      } else {
        id = *label.ignore_id();
      }
      out[static_cast<std::size_t>(y) * w + x] = id;
    }
  }
  return LabelMap(w, h, label.n_classes(), label.ignore_id(), std::move(out));
}

WarpResult warp_augment(const LabelMap& label, const EdgeMap& edge, const WarpConfig& cfg) {
  if (edge.width() != label.width() || edge.height() != label.height()) {
    throw Error("edge map and label map dimensions differ");
  }
  WarpResult result;
  result.fixed = sample_boundary_keypoints(edge, cfg.n_keypoints, cfg.tau,
                                           derive_seed(cfg.seed, {kSampleStream}));
  result.moving = jitter_keypoints(result.fixed, cfg.max_shift,
                                   derive_seed(cfg.seed, {kJitterStream}), label.width(),
                                   label.height());
  for (std::size_t k = 0; k < result.fixed.size(); ++k) {
    result.max_displacement =
        std::max({result.max_displacement, std::abs(result.moving[k].u - result.fixed[k].u),
                  std::abs(result.moving[k].v - result.fixed[k].v)});
  }
  // Content at fixed[k] must land on moving[k]; the backward map therefore
  // sends moving points to fixed points.
  result.transform = fit_tps(result.moving, result.fixed, cfg.lambda_reg);
  result.warped = warp_label_map(label, result.transform, cfg.border);
  return result;
}

}  // namespace sisaug
