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

#ifndef SISAUG_METRICS_HPP_
#define SISAUG_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sisaug/raster.hpp"

namespace sisaug {

// What to do with predicted pixels that carry the ignore id.
enum class VoidPolicy {
  kReject,       // error
  kCountAsMiss,  // count into a separate void column: a miss for the true class
};

// counts(j, i) = pixels of true class j predicted as class i.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int n_classes);

  int n_classes() const { return n_classes_; }
  std::uint64_t operator()(int gt, int pred) const {
    return counts_[static_cast<std::size_t>(gt) * n_classes_ + pred];
  }
  std::uint64_t& operator()(int gt, int pred) {
    return counts_[static_cast<std::size_t>(gt) * n_classes_ + pred];
  }
  // Pixels of true class j predicted as the ignore id.
  std::uint64_t void_count(int gt) const { return void_[gt]; }
  std::uint64_t& void_count(int gt) { return void_[gt]; }

  // t_j: every evaluated pixel whose true class is j (void predictions included).
  std::uint64_t gt_total(int j) const;
  // sum_j n_ji.
  std::uint64_t pred_total(int i) const;
  std::uint64_t trace() const;
  std::uint64_t total() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int n_classes_ = 0;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> void_;
};

// Adds every pixel whose ground truth is not the ignore id.
ConfusionMatrix accumulate_confusion(const LabelMap& gt, const LabelMap& pred,
                                     ConfusionMatrix acc,
                                     VoidPolicy void_policy = VoidPolicy::kReject);

ConfusionMatrix merge_confusion(const ConfusionMatrix& a, const ConfusionMatrix& b);

struct ClassMetrics {
  int class_id = 0;
  std::optional<double> pa;   // n_ii / t_i; absent when t_i == 0
  std::optional<double> iou;  // n_ii / (t_i + sum_j n_ji - n_ii); absent on zero union
  // False iff the class never occurs in either ground truth or prediction.
  bool present = false;
  std::uint64_t gt_pixels = 0;
  std::uint64_t pred_pixels = 0;
};

using ClassMetricTable = std::vector<ClassMetrics>;

ClassMetricTable per_class_metrics(const ConfusionMatrix& cm);

struct AggregateMetrics {
  double pa_overall = 0.0;
  // Mean PA over split classes with ground-truth pixels; absent if none.
  std::optional<double> ma;
  double miou = 0.0;
  int n_classes_used = 0;  // classes in the mIoU mean
  int n_classes_pa = 0;    // classes in the MA mean
};

// Unweighted means restricted to `split` (all classes when empty). Throws
// "empty split" when no split class is present.
AggregateMetrics aggregate(const ClassMetricTable& table, const ConfusionMatrix& cm,
                           std::optional<std::span<const int>> split = std::nullopt);

}  // namespace sisaug

#endif  // SISAUG_METRICS_HPP_
