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

#ifndef SISAUG_PNG_IO_HPP_
#define SISAUG_PNG_IO_HPP_

#include <filesystem>
#include <optional>

#include "sisaug/raster.hpp"

namespace sisaug {

// How to interpret the pixel values of a label PNG.
struct LabelFormat {
  // When absent, every non-ignore 8-bit value is accepted.
  std::optional<int> n_classes;
  std::optional<ClassId> ignore_id = kDefaultIgnoreId;
};

// Label maps are 8-bit single-channel PNGs (grayscale, or palette indices)
// whose pixel value is the class id.
LabelMap load_label_map(const std::filesystem::path& path,
                        const LabelFormat& format = {});
void save_label_map(const LabelMap& map, const std::filesystem::path& path);

// 8-bit grayscale or RGB PNG. Saving rounds half-up and clamps to [0, 255].
RasterImage load_image(const std::filesystem::path& path);
void save_image(const RasterImage& image, const std::filesystem::path& path);

// 8-bit grayscale PNG; strength = value / 255.
EdgeMap load_edge_map(const std::filesystem::path& path);
void save_edge_map(const EdgeMap& edges, const std::filesystem::path& path);

// Round-half-up quantization used by every 8-bit writer.
std::uint8_t quantize_u8(double value);

}  // namespace sisaug

#endif  // SISAUG_PNG_IO_HPP_
