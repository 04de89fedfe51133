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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "test_support.hpp"

namespace sisaug {
namespace {

using testing::oracle_metrics;
using testing::random_label_map;

ConfusionMatrix confusion_of(const LabelMap& gt, const LabelMap& pred, int n,
                             VoidPolicy policy = VoidPolicy::kReject) {
  return accumulate_confusion(gt, pred, ConfusionMatrix(n), policy);
}

ConfusionMatrix hand_example() {
  const LabelMap gt(4, 1, 2, kDefaultIgnoreId, std::vector<ClassId>{0, 0, 1, 1});
  const LabelMap pred(4, 1, 2, kDefaultIgnoreId, std::vector<ClassId>{0, 1, 1, 1});
  return confusion_of(gt, pred, 2);
}

TEST(AccumulateConfusionTest, PerfectPredictionIsDiagonal) {
  Rng rng(1);
  const LabelMap gt = random_label_map(rng, 4, 4, 3);
  const ConfusionMatrix cm = confusion_of(gt, gt, 3);
  EXPECT_EQ(cm.trace(), 16u);
  EXPECT_EQ(cm.total(), 16u);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      if (i != j) { EXPECT_EQ(cm(j, i), 0u); }
    }
  }
}

TEST(AccumulateConfusionTest, HandCount) {
  const ConfusionMatrix cm = hand_example();
  EXPECT_EQ(cm(0, 0), 1u);
  EXPECT_EQ(cm(0, 1), 1u);
  EXPECT_EQ(cm(1, 1), 2u);
  EXPECT_EQ(cm(1, 0), 0u);
}

TEST(AccumulateConfusionTest, IgnoredGroundTruthContributesNothing) {
  const LabelMap gt(4, 1, 2, kDefaultIgnoreId, std::vector<ClassId>{0, 255, 255, 1});
  const LabelMap pred(4, 1, 2, kDefaultIgnoreId, std::vector<ClassId>{0, 1, 255, 1});
  const ConfusionMatrix cm = confusion_of(gt, pred, 2);
  EXPECT_EQ(cm.total(), 2u);
  EXPECT_EQ(cm.trace(), 2u);
}

TEST(AccumulateConfusionTest, VoidPredictions) {
  const LabelMap gt(3, 1, 2, kDefaultIgnoreId, std::vector<ClassId>{0, 0, 1});
  const LabelMap pred(3, 1, 2, kDefaultIgnoreId, std::vector<ClassId>{255, 0, 1});
  EXPECT_THROW(confusion_of(gt, pred, 2), Error);
  const ConfusionMatrix cm = confusion_of(gt, pred, 2, VoidPolicy::kCountAsMiss);
  EXPECT_EQ(cm.void_count(0), 1u);
  EXPECT_EQ(cm.gt_total(0), 2u);
  EXPECT_EQ(cm.total(), 3u);
  const ClassMetricTable t = per_class_metrics(cm);
  EXPECT_DOUBLE_EQ(*t[0].pa, 0.5);
  EXPECT_DOUBLE_EQ(*t[0].iou, 0.5);
}

TEST(AccumulateConfusionTest, Errors) {
  EXPECT_THROW(confusion_of(LabelMap(2, 2, 2), LabelMap(2, 3, 2), 2), Error);
  const LabelMap gt(1, 1, 5, kDefaultIgnoreId, std::vector<ClassId>{4});
  EXPECT_THROW(confusion_of(gt, LabelMap(1, 1, 5), 3), Error);
  EXPECT_THROW(confusion_of(LabelMap(1, 1, 5), gt, 3), Error);
}

TEST(MergeConfusionTest, IdentityAndCommutativity) {
  Rng rng(2);
  const ConfusionMatrix a =
      confusion_of(random_label_map(rng, 8, 8, 4), random_label_map(rng, 8, 8, 4), 4);
  const ConfusionMatrix b =
      confusion_of(random_label_map(rng, 8, 8, 4), random_label_map(rng, 8, 8, 4), 4);
  EXPECT_EQ(merge_confusion(a, ConfusionMatrix(4)), a);
  EXPECT_EQ(merge_confusion(a, b), merge_confusion(b, a));
  EXPECT_THROW(merge_confusion(a, ConfusionMatrix(3)), Error);
}

TEST(MergeConfusionTest, SequentialEqualsMergedAndAssociative) {
  Rng rng(3);
  std::vector<LabelMap> gts, preds;
  for (int i = 0; i < 3; ++i) {
    gts.push_back(random_label_map(rng, 6, 6, 3));
    preds.push_back(random_label_map(rng, 6, 6, 3));
  }
  ConfusionMatrix seq(3);
  for (int i = 0; i < 3; ++i) seq = accumulate_confusion(gts[i], preds[i], seq);
  const auto c0 = confusion_of(gts[0], preds[0], 3);
  const auto c1 = confusion_of(gts[1], preds[1], 3);
  const auto c2 = confusion_of(gts[2], preds[2], 3);
  EXPECT_EQ(seq, merge_confusion(merge_confusion(c0, c1), c2));
  EXPECT_EQ(seq, merge_confusion(c0, merge_confusion(c1, c2)));
}

TEST(PerClassMetricsTest, PerfectPrediction) {
  Rng rng(4);
  const LabelMap gt = random_label_map(rng, 10, 10, 5);
  for (const auto& row : per_class_metrics(confusion_of(gt, gt, 5))) {
    if (!row.present) continue;
    EXPECT_EQ(*row.pa, 1.0);
    EXPECT_EQ(*row.iou, 1.0);
  }
}

TEST(PerClassMetricsTest, HandComputation) {
  const ClassMetricTable t = per_class_metrics(hand_example());
  EXPECT_DOUBLE_EQ(*t[0].pa, 0.5);
  EXPECT_DOUBLE_EQ(*t[1].pa, 1.0);
  EXPECT_DOUBLE_EQ(*t[0].iou, 0.5);
  EXPECT_DOUBLE_EQ(*t[1].iou, 2.0 / 3.0);
}

TEST(PerClassMetricsTest, AbsentClassExcluded) {
  const LabelMap gt(2, 1, 3, kDefaultIgnoreId, std::vector<ClassId>{0, 1});
  const ConfusionMatrix cm = confusion_of(gt, gt, 3);
  const ClassMetricTable t = per_class_metrics(cm);
  EXPECT_FALSE(t[2].present);
  EXPECT_FALSE(t[2].pa.has_value());
  EXPECT_FALSE(t[2].iou.has_value());
  const AggregateMetrics agg = aggregate(t, cm);
  EXPECT_EQ(agg.n_classes_used, 2);
  EXPECT_DOUBLE_EQ(agg.miou, 1.0);
}

TEST(PerClassMetricsTest, PredictedOnlyClassHasZeroIouAndNoPa) {
  const LabelMap gt(2, 1, 2, kDefaultIgnoreId, std::vector<ClassId>{0, 0});
  const LabelMap pred(2, 1, 2, kDefaultIgnoreId, std::vector<ClassId>{0, 1});
  const ClassMetricTable t = per_class_metrics(confusion_of(gt, pred, 2));
  EXPECT_TRUE(t[1].present);
  EXPECT_FALSE(t[1].pa.has_value());
  EXPECT_EQ(*t[1].iou, 0.0);
}

TEST(AggregateTest, SplitOfAllClassesEqualsUnrestricted) {
  Rng rng(5);
  const ConfusionMatrix cm =
      confusion_of(random_label_map(rng, 9, 9, 4), random_label_map(rng, 9, 9, 4), 4);
  const ClassMetricTable t = per_class_metrics(cm);
  const std::vector<int> all = {0, 1, 2, 3};
  const AggregateMetrics a = aggregate(t, cm);
  const AggregateMetrics b = aggregate(t, cm, all);
  EXPECT_EQ(a.miou, b.miou);
  EXPECT_EQ(a.ma, b.ma);
  EXPECT_EQ(a.pa_overall, b.pa_overall);
}

TEST(AggregateTest, SplitMeanOfHandTable) {
  ClassMetricTable t(3);
  const double iou[] = {0.5, 0.7, 0.3};
  for (int i = 0; i < 3; ++i) {
    t[i] = {i, iou[i], iou[i], true, 10, 10};
  }
  const std::vector<int> split = {0, 1};
  const AggregateMetrics agg = aggregate(t, ConfusionMatrix(3), split);
  EXPECT_NEAR(agg.miou, 0.6, 1e-15);
  EXPECT_EQ(agg.n_classes_used, 2);
}

TEST(AggregateTest, EmptySplitFails) {
  const LabelMap gt(2, 1, 3, kDefaultIgnoreId, std::vector<ClassId>{0, 0});
  const ConfusionMatrix cm = confusion_of(gt, gt, 3);
  const std::vector<int> split = {1, 2};
  try {
    aggregate(per_class_metrics(cm), cm, split);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "empty split");
  }
  const std::vector<int> bad = {7};
  EXPECT_THROW(aggregate(per_class_metrics(cm), cm, bad), Error);
}

TEST(MetricsOracleTest, RandomMapsMatchDoubleLoopOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(6));
    std::vector<LabelMap> gts, preds;
    ConfusionMatrix cm(n);
    for (int k = 0; k < 3; ++k) {
      gts.push_back(random_label_map(rng, 16, 16, n));
      preds.push_back(random_label_map(rng, 16, 16, n));
      cm = accumulate_confusion(gts.back(), preds.back(), cm);
    }
    const auto oracle = oracle_metrics(gts, preds, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) ASSERT_EQ(cm(j, i), oracle.counts[j][i]);
    }
    const ClassMetricTable t = per_class_metrics(cm);
    for (int i = 0; i < n; ++i) {
      ASSERT_EQ(t[i].pa.has_value(), oracle.pa[i].has_value());
      ASSERT_EQ(t[i].iou.has_value(), oracle.iou[i].has_value());
      if (t[i].pa) { EXPECT_NEAR(*t[i].pa, *oracle.pa[i], 1e-12); }
      if (t[i].iou) { EXPECT_NEAR(*t[i].iou, *oracle.iou[i], 1e-12); }
      if (t[i].pa && t[i].iou) {
        EXPECT_LE(0.0, *t[i].iou);
        EXPECT_LE(*t[i].iou, *t[i].pa);
        EXPECT_LE(*t[i].pa, 1.0);
      }
    }
    const AggregateMetrics agg = aggregate(t, cm);
    EXPECT_NEAR(agg.pa_overall, oracle.pa_overall, 1e-12);
    EXPECT_NEAR(agg.miou, *oracle.miou, 1e-12);
    EXPECT_NEAR(*agg.ma, *oracle.ma, 1e-12);
  }
}

TEST(MetricsOracleTest, ConsistentPermutationOfIds) {
  Rng rng(7);
  const int n = 5;
  for (int trial = 0; trial < 20; ++trial) {
    const LabelMap gt = random_label_map(rng, 12, 12, n);
    const LabelMap pred = random_label_map(rng, 12, 12, n);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
    auto remap = [&](const LabelMap& m) {
      LabelMap out = m;
      for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) out(x, y) = static_cast<ClassId>(perm[m(x, y)]);
      }
      return out;
    };
    const ConfusionMatrix a = confusion_of(gt, pred, n);
    const ConfusionMatrix b = confusion_of(remap(gt), remap(pred), n);
    const ClassMetricTable ta = per_class_metrics(a);
    const ClassMetricTable tb = per_class_metrics(b);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(ta[i].pa, tb[perm[i]].pa);
      EXPECT_EQ(ta[i].iou, tb[perm[i]].iou);
    }
    const std::vector<int> split = {0, 2, 3};
    std::vector<int> split_p;
    for (int id : split) split_p.push_back(perm[id]);
    std::sort(split_p.begin(), split_p.end());
    const AggregateMetrics sa = aggregate(ta, a, split);
    const AggregateMetrics sb = aggregate(tb, b, split_p);
    EXPECT_NEAR(sa.miou, sb.miou, 1e-12);
    EXPECT_NEAR(*sa.ma, *sb.ma, 1e-12);
  }
}

}  // namespace
}  // namespace sisaug
