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

#include "sisaug/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace sisaug {
namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error("raster dimensions must be positive, got " +
                std::to_string(width) + "x" + std::to_string(height));
  }
}

// Half-sample symmetric reflection into [0, n), periodic with period 2n.
int reflect_index(int i, int n) {
  const int period = 2 * n;
  int j = i % period;
  if (j < 0) j += period;
  return j < n ? j : period - 1 - j;
}

}  // namespace

RasterImage::RasterImage(int width, int height, int channels, double fill)
    : RasterImage(width, height, channels,
                  std::vector<double>(static_cast<std::size_t>(width > 0 ? width : 0) *
                                          (height > 0 ? height : 0) *
                                          (channels > 0 ? channels : 0),
                                      fill)) {}

RasterImage::RasterImage(int width, int height, int channels,
                         std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    throw Error("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
  if (data_.size() != pixel_count() * channels_) {
    throw Error("image data length does not match dimensions");
  }
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 255.0)) throw Error("image intensity outside [0, 255]");
  }
}

LabelMap::LabelMap(int width, int height, int n_classes,
                   std::optional<ClassId> ignore_id, ClassId fill)
    : LabelMap(width, height, n_classes, ignore_id,
               std::vector<ClassId>(static_cast<std::size_t>(width > 0 ? width : 0) *
                                        (height > 0 ? height : 0),
                                    fill)) {}

LabelMap::LabelMap(int width, int height, int n_classes,
                   std::optional<ClassId> ignore_id, std::vector<ClassId> data)
    : width_(width),
      height_(height),
      n_classes_(n_classes),
      ignore_id_(ignore_id),
      data_(std::move(data)) {
  check_dims(width, height);
  if (n_classes < 1 || n_classes > 256) {
    throw Error("n_classes must be in [1, 256], got " + std::to_string(n_classes));
  }
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error("label data length does not match dimensions");
  }
  for (ClassId id : data_) {
    if (!is_valid_id(id)) {
      throw Error("class id " + std::to_string(id) + " out of range for n_classes=" +
                  std::to_string(n_classes));
    }
  }
}

EdgeMap::EdgeMap(int width, int height, double fill)
    : EdgeMap(width, height,
              std::vector<double>(static_cast<std::size_t>(width > 0 ? width : 0) *
                                      (height > 0 ? height : 0),
                                  fill)) {}

EdgeMap::EdgeMap(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error("edge data length does not match dimensions");
  }
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("edge strength outside [0, 1]");
  }
}

ClassMask::ClassMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error("mask data length does not match dimensions");
  }
  for (auto& v : data_) {
    if (v > 1) throw Error("mask values must be 0 or 1");
  }
}

std::size_t ClassMask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), 1));
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error("gaussian_blur requires sigma > 0");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  const double denom = 2.0 * sigma * sigma;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-static_cast<double>(k) * k / denom);
  }
  const double sum = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (double& w : kernel) w /= sum;
  return kernel;
}

RasterImage gaussian_blur(const RasterImage& image, double sigma) {
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = image.width();
  const int h = image.height();
  const int nc = image.channels();

  // Horizontal pass into a scratch buffer, then vertical pass.
  std::vector<double> tmp(image.data().size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          acc += kernel[k + radius] * image(reflect_index(x + k, w), y, c);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * nc + c] = acc;
      }
    }
  }

  std::vector<double> out(tmp.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = reflect_index(y + k, h);
          acc += kernel[k + radius] * tmp[(static_cast<std::size_t>(yy) * w + x) * nc + c];
        }
        // Rounding can push a convex combination a few ulps past the range.
        out[(static_cast<std::size_t>(y) * w + x) * nc + c] = std::clamp(acc, 0.0, 255.0);
      }
    }
  }
  return RasterImage(w, h, nc, std::move(out));
}

EdgeMap label_boundary_edges(const LabelMap& label) {
  const int w = label.width();
  const int h = label.height();
  EdgeMap edges(w, h);
  constexpr int kDx[] = {1, -1, 0, 0};
  constexpr int kDy[] = {0, 0, 1, -1};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const ClassId id = label(x, y);
      for (int n = 0; n < 4; ++n) {
        const int nx = x + kDx[n];
        const int ny = y + kDy[n];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        if (label(nx, ny) != id) {
          edges(x, y) = 1.0;
          break;
        }
      }
    }
  }
  return edges;
}

}  // namespace sisaug
