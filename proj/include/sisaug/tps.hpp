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

#ifndef SISAUG_TPS_HPP_
#define SISAUG_TPS_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sisaug/raster.hpp"

namespace sisaug {

// Pixel coordinates: u is the column (x), v the row (y). Pixel centres sit
// on integer coordinates.
struct Point {
  double u = 0.0;
  double v = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

using KeyPointSet = std::vector<Point>;

// The edge map has no pixel at or above the sampling threshold.
class NoBoundaryError : public Error {
 public:
  NoBoundaryError() : Error("no boundary pixels above threshold") {}
};

// Collinear or (with lambda_reg = 0) duplicated control points.
class DegenerateControlPointsError : public Error {
 public:
  DegenerateControlPointsError() : Error("degenerate control points") {}
};

// Thin-plate spline f(p) = A [u v 1]^T + sum_k w_k U(|p - c_k|) with
// U(r) = r^2 log r^2 and U(0) = 0.
class TpsTransform {
 public:
  // Row d gives output axis d as [coef_u, coef_v, offset].
  using Affine = std::array<std::array<double, 3>, 2>;
  using Weight = std::array<double, 2>;

  TpsTransform() = default;
  TpsTransform(KeyPointSet control_points, Affine affine, std::vector<Weight> weights,
               double lambda_reg);

  static TpsTransform identity();

  const KeyPointSet& control_points() const { return control_points_; }
  const Affine& affine() const { return affine_; }
  const std::vector<Weight>& weights() const { return weights_; }
  double lambda_reg() const { return lambda_reg_; }

  Point operator()(Point p) const;

 private:
  KeyPointSet control_points_;
  Affine affine_ = {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}};
  std::vector<Weight> weights_;
  double lambda_reg_ = 0.0;
};

// Draws n points uniformly, with replacement, from the pixels whose edge
// strength is >= tau.
KeyPointSet sample_boundary_keypoints(const EdgeMap& edge, int n, double tau,
                                      std::uint64_t seed);

// Adds independent U(-max_shift, max_shift) shifts to both coordinates of
// every point, then clamps into [0, width-1] x [0, height-1].
KeyPointSet jitter_keypoints(const KeyPointSet& fixed, double max_shift,
                             std::uint64_t seed, int width, int height);

// Solves the regularized TPS system that maps fixed[k] onto moving[k]:
//   [K + lambda I  P] [w]   [moving]
//   [P^T           0] [a] = [  0   ]
// Throws "degenerate control points" when the system is singular.
TpsTransform fit_tps(const KeyPointSet& fixed, const KeyPointSet& moving,
                     double lambda_reg);

Point evaluate_tps(const TpsTransform& t, Point p);

// sum over output axes of w^T K w, with K the unregularized kernel matrix.
double bending_energy(const TpsTransform& t);

enum class BorderMode {
  kClamp,       // sample the nearest border pixel
  kIgnoreFill,  // write the map's ignore id
};

// Backward nearest-neighbour warp: output(u, v) = label(round(t(u, v))).
LabelMap warp_label_map(const LabelMap& label, const TpsTransform& t,
                        BorderMode border = BorderMode::kClamp);

struct WarpConfig {
  int n_keypoints = 64;
  double tau = 0.5;
  double max_shift = 4.0;
  double lambda_reg = 1e-3;
  BorderMode border = BorderMode::kClamp;
  std::uint64_t seed = 0;
};

struct WarpResult {
  LabelMap warped;
  // Backward map (moving -> fixed); reuse it to warp aligned instance maps.
  TpsTransform transform;
  KeyPointSet fixed;
  KeyPointSet moving;
  // Largest per-axis keypoint shift actually applied.
  double max_displacement = 0.0;
};

// Boundary-seeded TPS augmentation: sample keypoints on the edges, jitter
// them, fit the backward transform moving -> fixed and resample the map.
WarpResult warp_augment(const LabelMap& label, const EdgeMap& edge, const WarpConfig& cfg);

// Radial kernel U(r) evaluated from the squared distance.
inline double tps_kernel(double squared_distance) {
  return squared_distance > 0.0 ? squared_distance * std::log(squared_distance) : 0.0;
}

}  // namespace sisaug

#endif  // SISAUG_TPS_HPP_
