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

#ifndef SISAUG_BIAS_HPP_
#define SISAUG_BIAS_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sisaug/metrics.hpp"
#include "sisaug/perturb.hpp"

namespace sisaug {

enum class MetricKind { kPixelAccuracy, kIoU };

std::string_view metric_name(MetricKind kind);  // "pa" / "iou"

struct PerturbedScore {
  std::optional<double> pa;
  std::optional<double> iou;
};

// Cumulative metrics of class i measured on the images perturbed for class i,
// one entry per scheme that was run.
class PerturbedMetricSet {
 public:
  void set(int class_id, SchemeKind scheme, PerturbedScore score);
  const std::map<int, std::map<SchemeKind, PerturbedScore>>& by_class() const {
    return scores_;
  }
  // Schemes with at least one entry, in canonical order.
  std::vector<SchemeKind> schemes() const;

 private:
  std::map<int, std::map<SchemeKind, PerturbedScore>> scores_;
};

// Which metric kinds may trigger the biased label.
enum class BiasCriterion {
  kJoint,  // PA or IoU
  kPixelAccuracyOnly,
  kIoUOnly,
};

struct BiasTrigger {
  SchemeKind scheme;
  MetricKind metric;
  // The real-image metric was 0, so any positive perturbed score triggers.
  bool zero_real_metric = false;
};

struct BiasSplit {
  double delta = 2.0 / 3.0;
  std::vector<int> biased;
  std::vector<int> unbiased;
  // One entry per evaluated class; nullopt for unbiased classes.
  std::map<int, std::optional<BiasTrigger>> provenance;
  std::vector<SchemeKind> scheme_coverage;
  std::vector<std::string> warnings;
  // Set for bundled reference splits.
  std::string dataset;
};

inline constexpr double kDefaultDelta = 2.0 / 3.0;

// Class i (with ground-truth pixels in the real evaluation) is biased iff a
// perturbed score strictly exceeds delta times the real score of the same
// kind, for some scheme. Schemes are checked in canonical order, PA before
// IoU, so the recorded trigger does not depend on input order.
BiasSplit classify_bias(const ClassMetricTable& real, const PerturbedMetricSet& perturbed,
                        double delta = kDefaultDelta,
                        BiasCriterion criterion = BiasCriterion::kJoint);

// Biased class lists bundled for "coco-stuff", "ade20k" and "cityscapes".
// The unbiased list is the complement within the dataset's evaluated ids.
BiasSplit load_reference_split(std::string_view dataset_name);

struct ReferenceDataset {
  std::string name;
  double sigma0 = 0.0;
  std::vector<int> evaluated_classes;
  std::map<int, std::string> biased_names;
};

ReferenceDataset reference_dataset(std::string_view dataset_name);

}  // namespace sisaug

#endif  // SISAUG_BIAS_HPP_
