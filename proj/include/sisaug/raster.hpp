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

#ifndef SISAUG_RASTER_HPP_
#define SISAUG_RASTER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sisaug {

// All precondition violations and I/O failures surface as this exception.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ClassId = std::uint8_t;

// Conventional ignore ("void") id for 8-bit label maps.
inline constexpr ClassId kDefaultIgnoreId = 255;

// Multi-channel intensity grid, row-major and channel-interleaved.
// Intensities are kept as reals in [0, 255] and only quantized on save.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, double fill = 0.0);
  RasterImage(int width, int height, int channels, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  double operator()(int x, int y, int c) const { return data_[offset(x, y, c)]; }
  double& operator()(int x, int y, int c) { return data_[offset(x, y, c)]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t offset(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<double> data_;
};

// Per-pixel class ids. Every id is < n_classes or equal to ignore_id.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int width, int height, int n_classes,
           std::optional<ClassId> ignore_id = kDefaultIgnoreId,
           ClassId fill = 0);
  LabelMap(int width, int height, int n_classes,
           std::optional<ClassId> ignore_id, std::vector<ClassId> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int n_classes() const { return n_classes_; }
  std::optional<ClassId> ignore_id() const { return ignore_id_; }
  std::size_t pixel_count() const { return data_.size(); }

  ClassId operator()(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  // Unchecked write; callers keep ids within the declared range.
  ClassId& operator()(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  bool is_ignored(ClassId id) const { return ignore_id_ && *ignore_id_ == id; }
  bool is_valid_id(ClassId id) const { return id < n_classes_ || is_ignored(id); }

  std::span<const ClassId> data() const { return data_; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int n_classes_ = 0;
  std::optional<ClassId> ignore_id_;
  std::vector<ClassId> data_;
};

// Edge strengths in [0, 1].
class EdgeMap {
 public:
  EdgeMap() = default;
  EdgeMap(int width, int height, double fill = 0.0);
  EdgeMap(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }

  double operator()(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  double& operator()(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<const double> data() const { return data_; }

  friend bool operator==(const EdgeMap&, const EdgeMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// Binary per-pixel mask.
class ClassMask {
 public:
  ClassMask() = default;
  ClassMask(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }

  bool operator()(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  std::size_t count() const;

  std::span<const std::uint8_t> data() const { return data_; }

  friend bool operator==(const ClassMask&, const ClassMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Separable Gaussian convolution applied per channel. The kernel has
// half-width ceil(3 * sigma) and is normalized to unit sum; borders use
// half-sample symmetric reflection (... b a | a b ... y z | z y ...),
// folded periodically when the kernel is wider than the image.
RasterImage gaussian_blur(const RasterImage& image, double sigma);

// Normalized 1-D kernel of the blur, indexed -radius..radius.
std::vector<double> gaussian_kernel(double sigma);

// Marks every pixel with a 4-neighbour of different id. The ignore id is
// treated as a class of its own.
EdgeMap label_boundary_edges(const LabelMap& label);

}  // namespace sisaug

#endif  // SISAUG_RASTER_HPP_
