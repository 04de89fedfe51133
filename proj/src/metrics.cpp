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

#include "sisaug/metrics.hpp"

#include <numeric>
#include <string>

namespace sisaug {

ConfusionMatrix::ConfusionMatrix(int n_classes)
    : n_classes_(n_classes),
      counts_(static_cast<std::size_t>(n_classes) * n_classes, 0),
      void_(n_classes, 0) {
  if (n_classes < 1) throw Error("confusion matrix needs n_classes >= 1");
}

std::uint64_t ConfusionMatrix::gt_total(int j) const {
  std::uint64_t t = void_[j];
  for (int i = 0; i < n_classes_; ++i) t += (*this)(j, i);
  return t;
}

std::uint64_t ConfusionMatrix::pred_total(int i) const {
  std::uint64_t t = 0;
  for (int j = 0; j < n_classes_; ++j) t += (*this)(j, i);
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (int i = 0; i < n_classes_; ++i) t += (*this)(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}) +
         std::accumulate(void_.begin(), void_.end(), std::uint64_t{0});
}

ConfusionMatrix accumulate_confusion(const LabelMap& gt, const LabelMap& pred,
                                     ConfusionMatrix acc, VoidPolicy void_policy) {
  if (gt.width() != pred.width() || gt.height() != pred.height()) {
    throw Error("dimension mismatch between ground truth and prediction");
  }
  const int n = acc.n_classes();
  auto g = gt.data();
  auto p = pred.data();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (gt.is_ignored(g[k])) continue;
    if (g[k] >= n) {
      throw Error("ground-truth id " + std::to_string(g[k]) + " out of range");
    }
    if (pred.is_ignored(p[k])) {
      if (void_policy == VoidPolicy::kReject) {
        throw Error("prediction contains the ignore id");
      }
      ++acc.void_count(g[k]);
      continue;
    }
    if (p[k] >= n) throw Error("predicted id " + std::to_string(p[k]) + " out of range");
    ++acc(g[k], p[k]);
  }
  return acc;
}

ConfusionMatrix merge_confusion(const ConfusionMatrix& a, const ConfusionMatrix& b) {
  if (a.n_classes() != b.n_classes()) throw Error("confusion matrix size mismatch");
  ConfusionMatrix out = a;
  for (int j = 0; j < a.n_classes(); ++j) {
    for (int i = 0; i < a.n_classes(); ++i) out(j, i) += b(j, i);
    out.void_count(j) += b.void_count(j);
  }
  return out;
}

ClassMetricTable per_class_metrics(const ConfusionMatrix& cm) {
  ClassMetricTable table(cm.n_classes());
  for (int i = 0; i < cm.n_classes(); ++i) {
    ClassMetrics& row = table[i];
    row.class_id = i;
    row.gt_pixels = cm.gt_total(i);
    row.pred_pixels = cm.pred_total(i);
    const std::uint64_t tp = cm(i, i);
    const std::uint64_t uni = row.gt_pixels + row.pred_pixels - tp;
    if (row.gt_pixels > 0) row.pa = static_cast<double>(tp) / row.gt_pixels;
    if (uni > 0) row.iou = static_cast<double>(tp) / uni;
    row.present = uni > 0;
  }
  return table;
}

AggregateMetrics aggregate(const ClassMetricTable& table, const ConfusionMatrix& cm,
                           std::optional<std::span<const int>> split) {
  std::vector<bool> selected(table.size(), !split.has_value());
  if (split) {
    for (int id : *split) {
      if (id < 0 || static_cast<std::size_t>(id) >= table.size()) {
        throw Error("split class id " + std::to_string(id) + " out of range");
      }
      selected[id] = true;
    }
  }
  AggregateMetrics out;
  const std::uint64_t total = cm.total();
  out.pa_overall = total > 0 ? static_cast<double>(cm.trace()) / total : 0.0;

  double pa_sum = 0.0;
  double iou_sum = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!selected[i]) continue;
    if (table[i].pa) {
      pa_sum += *table[i].pa;
      ++out.n_classes_pa;
    }
    if (table[i].iou) {
      iou_sum += *table[i].iou;
      ++out.n_classes_used;
    }
  }
  if (out.n_classes_used == 0) throw Error("empty split");
  out.miou = iou_sum / out.n_classes_used;
  if (out.n_classes_pa > 0) out.ma = pa_sum / out.n_classes_pa;
  return out;
}

}  // namespace sisaug
