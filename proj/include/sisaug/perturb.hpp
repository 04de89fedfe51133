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

#ifndef SISAUG_PERTURB_HPP_
#define SISAUG_PERTURB_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sisaug/dataset.hpp"
#include "sisaug/raster.hpp"

namespace sisaug {

enum class SchemeKind { kConstant, kAverage, kBlur, kLognormal };

inline constexpr std::array<SchemeKind, 4> kAllSchemes = {
    SchemeKind::kConstant, SchemeKind::kAverage, SchemeKind::kBlur,
    SchemeKind::kLognormal};

// "constant", "average", "blur", "lognormal".
std::string_view scheme_name(SchemeKind kind);
SchemeKind parse_scheme(std::string_view name);

struct ConstantScheme {
  double c0 = 128.0;
};
struct AverageScheme {};
struct BlurScheme {
  double sigma0 = 25.0;
};
struct LognormalScheme {
  std::uint64_t seed = 0;
};

using PerturbScheme =
    std::variant<ConstantScheme, AverageScheme, BlurScheme, LognormalScheme>;

SchemeKind scheme_kind(const PerturbScheme& scheme);

// Gaussian standard deviation for a blur kernel of size K (sigma0 = K / 3).
inline double sigma_from_kernel_size(double kernel_size) { return kernel_size / 3.0; }

// Lognormal parameters of one channel of a masked segment. Intensities p
// are mapped to y = ln(p + 1); mu and sigma are the mean and population
// standard deviation of y. Samples are exp(z) - 1, z ~ N(mu, sigma^2).
struct LognormalFit {
  double mu = 0.0;
  double sigma = 0.0;

  // Moments of the unclamped exp(z) - 1 distribution.
  double mean() const;
  double stddev() const;
};

LognormalFit fit_lognormal(const RasterImage& image, const ClassMask& mask, int channel);

ClassMask class_mask(const LabelMap& label, ClassId class_id);

// X * (1 - M) + P * M. Unmasked pixels are copied bit-for-bit.
RasterImage apply_perturbation(const RasterImage& image, const ClassMask& mask,
                               const PerturbScheme& scheme);

struct PerturbManifestEntry {
  std::string image;  // output path, relative to the output directory
  int class_id = 0;
  std::string scheme;
  std::size_t masked_pixels = 0;
  std::string status;  // "perturbed", "absent", or "error: ..."
};

struct PerturbOptions {
  int n_classes = 256;
  std::optional<ClassId> ignore_id = kDefaultIgnoreId;
  int workers = 1;
};

// Writes one image per pair into out_dir, named <stem>.png. Images without
// the class are copied unchanged and flagged "absent". Lognormal seeds are
// derived per image from the scheme seed and the pair index.
std::vector<PerturbManifestEntry> perturb_dataset(const std::vector<PairedFiles>& pairs,
                                                  ClassId class_id,
                                                  const PerturbScheme& scheme,
                                                  const std::filesystem::path& out_dir,
                                                  const PerturbOptions& options);

}  // namespace sisaug

#endif  // SISAUG_PERTURB_HPP_
