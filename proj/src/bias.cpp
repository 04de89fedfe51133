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

#include "sisaug/bias.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "reference_data.hpp"

namespace sisaug {

std::string_view metric_name(MetricKind kind) {
  return kind == MetricKind::kPixelAccuracy ? "pa" : "iou";
}

void PerturbedMetricSet::set(int class_id, SchemeKind scheme, PerturbedScore score) {
  for (const auto& v : {score.pa, score.iou}) {
    if (v && !(*v >= 0.0 && *v <= 1.0)) throw Error("perturbed metric outside [0, 1]");
  }
  scores_[class_id][scheme] = score;
}

std::vector<SchemeKind> PerturbedMetricSet::schemes() const {
  std::set<SchemeKind> seen;
  for (const auto& [_, per_scheme] : scores_) {
    for (const auto& [scheme, __] : per_scheme) seen.insert(scheme);
  }
  return {seen.begin(), seen.end()};
}

BiasSplit classify_bias(const ClassMetricTable& real, const PerturbedMetricSet& perturbed,
                        double delta, BiasCriterion criterion) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error("delta must be in (0, 1]");
  BiasSplit split;
  split.delta = delta;
  split.scheme_coverage = perturbed.schemes();
  for (SchemeKind k : kAllSchemes) {
    if (std::find(split.scheme_coverage.begin(), split.scheme_coverage.end(), k) ==
        split.scheme_coverage.end()) {
      split.warnings.push_back("no perturbed metrics for scheme " +
                               std::string(scheme_name(k)));
    }
  }

  std::vector<MetricKind> kinds;
  if (criterion != BiasCriterion::kIoUOnly) kinds.push_back(MetricKind::kPixelAccuracy);
  if (criterion != BiasCriterion::kPixelAccuracyOnly) kinds.push_back(MetricKind::kIoU);

  std::set<int> evaluated;
  for (const ClassMetrics& row : real) {
    if (row.gt_pixels > 0 && row.pa && row.iou) evaluated.insert(row.class_id);
  }
  for (const auto& [class_id, _] : perturbed.by_class()) {
    if (!evaluated.count(class_id)) {
      split.warnings.push_back("class " + std::to_string(class_id) +
                               " has no ground-truth pixels in the real evaluation; excluded");
    }
  }

  for (const ClassMetrics& row : real) {
    if (!evaluated.count(row.class_id)) continue;
    std::optional<BiasTrigger> trigger;
    auto it = perturbed.by_class().find(row.class_id);
    if (it != perturbed.by_class().end()) {
      for (SchemeKind scheme : kAllSchemes) {
        auto s = it->second.find(scheme);
        if (s == it->second.end()) continue;
        for (MetricKind kind : kinds) {
          const double real_score = kind == MetricKind::kPixelAccuracy ? *row.pa : *row.iou;
          const auto& score = kind == MetricKind::kPixelAccuracy ? s->second.pa : s->second.iou;
          if (score && *score > delta * real_score) {
            trigger = BiasTrigger{scheme, kind, real_score == 0.0};
            break;
          }
        }
        if (trigger) break;
      }
    }
    (trigger ? split.biased : split.unbiased).push_back(row.class_id);
    split.provenance[row.class_id] = trigger;
  }
  return split;
}

ReferenceDataset reference_dataset(std::string_view dataset_name) {
  const std::string_view text = reference_split_json(dataset_name);
  if (text.empty()) throw Error("unknown dataset: " + std::string(dataset_name));
  const nlohmann::json doc = nlohmann::json::parse(text);
  ReferenceDataset ref;
  ref.name = doc.at("dataset").get<std::string>();
  ref.sigma0 = doc.at("sigma0").get<double>();
  ref.evaluated_classes = doc.at("evaluated_classes").get<std::vector<int>>();
  for (const auto& entry : doc.at("biased")) {
    ref.biased_names[entry.at("id").get<int>()] = entry.at("name").get<std::string>();
  }
  return ref;
}

BiasSplit load_reference_split(std::string_view dataset_name) {
  const ReferenceDataset ref = reference_dataset(dataset_name);
  BiasSplit split;
  split.delta = kDefaultDelta;
  split.dataset = ref.name;
  for (int id : ref.evaluated_classes) {
    if (ref.biased_names.count(id)) {
      split.biased.push_back(id);
    } else {
      split.unbiased.push_back(id);
    }
  }
  return split;
}

}  // namespace sisaug
