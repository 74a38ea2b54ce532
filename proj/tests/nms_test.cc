// Copyright 2026 The obbkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "obbkit/nms.h"

#include <algorithm>
#include <list>
#include <random>

#include "gtest/gtest.h"
#include "obbkit/error.h"

namespace obbkit {
namespace {

Detection Axis(ClassLabel c, double s, AxisAlignedBox b) { return {c, s, b}; }

// Repeatedly take the best remaining detection and drop its same-class
// neighbors. Ties go to the earlier input index.
std::vector<std::size_t> ReferenceNms(const std::vector<Detection>& dets, double thr) {
  std::list<std::size_t> pool;
  for (std::size_t i = 0; i < dets.size(); ++i) pool.push_back(i);
  std::vector<std::size_t> kept;
  while (!pool.empty()) {
    auto best = pool.begin();
    for (auto it = pool.begin(); it != pool.end(); ++it) {
      if (dets[*it].score > dets[*best].score) best = it;
    }
    const std::size_t k = *best;
    kept.push_back(k);
    pool.erase(best);
    pool.remove_if([&](std::size_t j) {
      return dets[j].cls == dets[k].cls && iou(dets[j].box, dets[k].box) > thr;
    });
  }
  return kept;
}

std::vector<Detection> RandomOriented(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> pos(0, 60);
  std::uniform_real_distribution<double> ext(3, 15);
  std::uniform_real_distribution<double> ang(0, 180);
  std::uniform_real_distribution<double> score(0, 1);
  std::uniform_int_distribution<int> cls(1, 2);
  std::vector<Detection> dets;
  for (int i = 0; i < n; ++i) {
    // Coarse scores create ties on purpose.
    const double s = std::round(score(rng) * 20) / 20;
    dets.push_back({static_cast<ClassLabel>(cls(rng)), s,
                    OrientedBox{pos(rng), pos(rng), ext(rng), ext(rng) / 2, ang(rng)}});
  }
  return dets;
}

TEST(Nms, SingleAndEmpty) {
  const std::vector<Detection> one{Axis(ClassLabel::kGun, 0.4, {0, 0, 2, 2})};
  EXPECT_EQ(nms_indices(one, 0.5, BoxKind::kAxis), (std::vector<std::size_t>{0}));
  EXPECT_TRUE(nms_indices(std::vector<Detection>{}, 0.5, BoxKind::kOriented).empty());
}

TEST(Nms, RemovesDuplicateKeepsHigherScore) {
  const std::vector<Detection> d{Axis(ClassLabel::kGun, 0.6, {0, 0, 10, 10}),
                                 Axis(ClassLabel::kGun, 0.9, {0, 0, 10, 10}),
                                 Axis(ClassLabel::kGun, 0.7, {20, 0, 30, 10})};
  EXPECT_EQ(nms_indices(d, 0.5, BoxKind::kAxis), (std::vector<std::size_t>{1, 2}));
  const std::vector<Detection> kept = nms(d, 0.5, BoxKind::kAxis);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].score, 0.9);
}

TEST(Nms, ThresholdIsStrict) {
  // IoU exactly 0.5: kept at threshold 0.5, suppressed below it.
  const std::vector<Detection> d{Axis(ClassLabel::kGun, 0.9, {0, 0, 10, 10}),
                                 Axis(ClassLabel::kGun, 0.8, {0, 0, 10, 5})};
  EXPECT_EQ(nms_indices(d, 0.5, BoxKind::kAxis).size(), 2u);
  EXPECT_EQ(nms_indices(d, 0.49, BoxKind::kAxis).size(), 1u);
}

TEST(Nms, ClassesDoNotSuppressEachOther) {
  const std::vector<Detection> d{Axis(ClassLabel::kGun, 0.9, {0, 0, 10, 10}),
                                 Axis(ClassLabel::kRifle, 0.8, {0, 0, 10, 10})};
  EXPECT_EQ(nms_indices(d, 0.3, BoxKind::kAxis).size(), 2u);
}

TEST(Nms, RejectsBadInput) {
  const std::vector<Detection> mixed{Axis(ClassLabel::kGun, 0.9, {0, 0, 1, 1}),
                                     {ClassLabel::kGun, 0.8, OrientedBox{0, 0, 1, 1, 0}}};
  EXPECT_THROW(nms_indices(mixed, 0.5, BoxKind::kAxis), InvalidInput);
  const std::vector<Detection> ok{Axis(ClassLabel::kGun, 0.9, {0, 0, 1, 1})};
  EXPECT_THROW(nms_indices(ok, 0.0, BoxKind::kAxis), InvalidInput);
  EXPECT_THROW(nms_indices(ok, 1.0, BoxKind::kAxis), InvalidInput);
  EXPECT_THROW(nms_indices(ok, 0.5, BoxKind::kOriented), InvalidInput);
  const std::vector<Detection> bg{Axis(ClassLabel::kBackground, 0.9, {0, 0, 1, 1})};
  EXPECT_THROW(nms_indices(bg, 0.5, BoxKind::kAxis), InvalidInput);
}

TEST(Nms, AgreesWithReferenceAndKeepsProperties) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> thr(0.1, 0.9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<Detection> d = RandomOriented(rng, 30);
    const double t = thr(rng);
    const std::vector<std::size_t> kept = nms_indices(d, t, BoxKind::kOriented);
    ASSERT_EQ(kept, ReferenceNms(d, t));
    for (std::size_t a = 0; a < kept.size(); ++a) {
      for (std::size_t b = a + 1; b < kept.size(); ++b) {
        ASSERT_GE(d[kept[a]].score, d[kept[b]].score);
        if (d[kept[a]].cls == d[kept[b]].cls) {
          ASSERT_LE(iou(d[kept[a]].box, d[kept[b]].box), t);
        }
      }
    }
    ASSERT_EQ(nms_indices(d, t, BoxKind::kOriented), kept);
  }
}

TEST(Nms, InvariantUnderMonotoneScoreMap) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Detection> d = RandomOriented(rng, 25);
    const std::vector<std::size_t> kept = nms_indices(d, 0.3, BoxKind::kOriented);
    for (Detection& x : d) x.score = x.score * x.score * 0.5;
    ASSERT_EQ(nms_indices(d, 0.3, BoxKind::kOriented), kept);
  }
}

}  // namespace
}  // namespace obbkit
