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

#ifndef SISAUG_SERIALIZE_HPP_
#define SISAUG_SERIALIZE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sisaug/bias.hpp"
#include "sisaug/metrics.hpp"
#include "sisaug/perturb.hpp"

namespace sisaug {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// {class_id, pa, iou, present, gt_pixels, pred_pixels}; absent ratios are null.
Json class_row_to_json(const ClassMetrics& row);
ClassMetrics class_row_from_json(const Json& row);

// Rows of a metrics document's "per_class" array.
ClassMetricTable table_from_metrics_json(const Json& doc);

Json bias_split_to_json(const BiasSplit& split);
BiasSplit bias_split_from_json(const Json& doc);

Json perturb_manifest_to_json(const std::vector<PerturbManifestEntry>& entries);

Json read_json_file(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
void write_json_file(const Json& doc, const std::filesystem::path& path);
std::string dump_json(const Json& doc);

}  // namespace sisaug

#endif  // SISAUG_SERIALIZE_HPP_
