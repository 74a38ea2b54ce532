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

#include "obbkit/eval.h"

#include <random>

#include "gtest/gtest.h"
#include "obbkit/data.h"
#include "obbkit/error.h"
#include "oracles/oracles.h"

namespace obbkit {
namespace {

GroundTruthInstance Gt(ClassLabel c, AxisAlignedBox b, double angle = 0.0) {
  return {c, b, angle, std::nullopt};
}

Detection Det(ClassLabel c, double s, AxisAlignedBox b) { return {c, s, b}; }

ImageRecord FromScene(const SyntheticScene& s, BoxKind kind) {
  ImageRecord r{s.annotations.image_id, s.annotations.instances, {}};
  for (const Detection& d : s.oracle_detections) {
    if (d.kind() == kind) r.dets.push_back(d);
  }
  return r;
}

std::vector<ImageRecord> RandomDataset(std::uint64_t seed, int scenes, BoxKind kind) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0, 1);
  std::vector<ImageRecord> data;
  for (int k = 0; k < scenes; ++k) {
    SyntheticParams p;
    p.noise = noise(rng);
    p.n_instances = 1 + k % 5;
    data.push_back(FromScene(generate_synthetic_scene(seed * 1000 + k, p), kind));
  }
  return data;
}

TEST(MatchDetections, Examples) {
  const std::vector<GroundTruthInstance> gts{Gt(ClassLabel::kGun, {0, 0, 10, 10})};
  // IoU 0.6 and 0.45 against the ground truth.
  const std::vector<Detection> hit{Det(ClassLabel::kGun, 0.9, {0, 0, 10, 6})};
  const std::vector<Detection> miss{Det(ClassLabel::kGun, 0.9, {0, 0, 10, 4.5})};
  EXPECT_EQ(match_detections(hit, gts, 0.5, BoxKind::kAxis), (std::vector<bool>{true}));
  EXPECT_EQ(match_detections(miss, gts, 0.5, BoxKind::kAxis), (std::vector<bool>{false}));
  const std::vector<Detection> dup{Det(ClassLabel::kGun, 0.8, {0, 0, 10, 10}),
                                   Det(ClassLabel::kGun, 0.9, {0, 0, 10, 10})};
  EXPECT_EQ(match_detections(dup, gts, 0.5, BoxKind::kAxis),
            (std::vector<bool>{false, true}));
  const std::vector<Detection> wrong{Det(ClassLabel::kRifle, 0.9, {0, 0, 10, 10})};
  EXPECT_EQ(match_detections(wrong, gts, 0.5, BoxKind::kAxis), (std::vector<bool>{false}));
}

TEST(MatchDetections, TakesBestUnmatchedGt) {
  const std::vector<GroundTruthInstance> gts{Gt(ClassLabel::kGun, {0, 0, 10, 10}),
                                             Gt(ClassLabel::kGun, {2, 0, 12, 10})};
  const std::vector<Detection> dets{Det(ClassLabel::kGun, 0.9, {0, 0, 10, 10}),
                                    Det(ClassLabel::kGun, 0.8, {0, 0, 10, 10})};
  // Second detection falls back to the other instance (IoU 8/12).
  EXPECT_EQ(match_detections(dets, gts, 0.5, BoxKind::kAxis),
            (std::vector<bool>{true, true}));
}

TEST(AveragePrecision, Examples) {
  EXPECT_EQ(average_precision(std::vector<ScoredFlag>{{0.5, true}}, 1), 1.0);
  EXPECT_EQ(average_precision(std::vector<ScoredFlag>{}, 1), 0.0);
  EXPECT_EQ(average_precision(std::vector<ScoredFlag>{{0.9, true}, {0.8, false}}, 1), 1.0);
  EXPECT_EQ(average_precision(std::vector<ScoredFlag>{{0.9, false}, {0.8, true}}, 1), 0.5);
  EXPECT_FALSE(average_precision(std::vector<ScoredFlag>{{0.9, false}}, 0).has_value());
  // Two GT: TP, FP, TP -> 0.5 * 1 + 0.5 * 2/3.
  EXPECT_NEAR(*average_precision(
                  std::vector<ScoredFlag>{{0.9, true}, {0.8, false}, {0.7, true}}, 2),
              0.5 + 0.5 * 2.0 / 3.0, 1e-15);
}

TEST(EvaluateDetections, PerfectDetectionsScoreOne) {
  std::vector<ImageRecord> data;
  data.push_back({"a", {Gt(ClassLabel::kGun, {0, 0, 10, 4}, 30), Gt(ClassLabel::kRifle, {20, 20, 60, 30}, 100)}, {}});
  for (const GroundTruthInstance& g : data[0].gts) {
    data[0].dets.push_back({g.cls, 1.0, rotate_aabb(g.aabb, g.angle)});
  }
  const std::vector<double> thr{0.4, 0.5, 0.6, 0.9};
  const EvalResult r = evaluate_detections(data, thr, {BoxKind::kOriented});
  ASSERT_EQ(r.map.size(), 4u);
  for (const auto& m : r.map) EXPECT_EQ(m, 1.0);
  EXPECT_EQ(r.entry(ClassLabel::kGun, 0).tp, 1);
  EXPECT_EQ(r.entry(ClassLabel::kRifle, 3).fn, 0);
}

TEST(EvaluateDetections, JitterSeparatesThresholds) {
  // Shifting a 10x10 box by d gives IoU (10 - d) / (10 + d); pick IoU 0.45.
  const double q = 0.45;
  const double d = 10 * (1 - q) / (1 + q);
  std::vector<ImageRecord> data;
  for (int i = 0; i < 5; ++i) {
    const double x = 30.0 * i;
    const ClassLabel c = i % 2 ? ClassLabel::kRifle : ClassLabel::kGun;
    data.push_back({"img" + std::to_string(i),
                    {Gt(c, {x, 0, x + 10, 10})},
                    {Det(c, 0.5 + 0.1 * i, {x + d, 0, x + d + 10, 10})}});
    ASSERT_NEAR(iou_aabb(data.back().gts[0].aabb,
                         std::get<AxisAlignedBox>(data.back().dets[0].box)),
                q, 1e-12);
  }
  const std::vector<double> thr{0.4, 0.5, 0.6};
  const EvalResult r = evaluate_detections(data, thr);
  EXPECT_EQ(r.map[0], 1.0);
  EXPECT_EQ(r.map[1], 0.0);
  EXPECT_EQ(r.map[2], 0.0);
  EXPECT_EQ(r.entry(ClassLabel::kGun, 2).fp, 3);
  EXPECT_EQ(r.entry(ClassLabel::kGun, 2).fn, 3);
}

TEST(EvaluateDetections, MatchesReferenceEvaluator) {
  for (BoxKind kind : {BoxKind::kAxis, BoxKind::kOriented}) {
    const std::vector<ImageRecord> data = RandomDataset(61, 100, kind);
    const std::vector<double> thr{0.4, 0.5, 0.6, 0.75};
    const EvalResult r = evaluate_detections(data, thr, {kind});
    for (std::size_t t = 0; t < thr.size(); ++t) {
      for (ClassLabel c : kObjectClasses) {
        const oracle::RefEntry ref = oracle::reference_class_ap(data, c, thr[t], kind);
        const ClassApEntry& e = r.entry(c, t);
        EXPECT_EQ(e.ap, ref.ap);
        EXPECT_EQ(e.tp, ref.tp);
        EXPECT_EQ(e.fp, ref.fp);
        EXPECT_EQ(e.n_gt, ref.n_gt);
        EXPECT_EQ(e.fn, ref.n_gt - ref.tp);
      }
      EXPECT_EQ(r.map[t], oracle::reference_map(data, thr[t], kind));
    }
  }
}

TEST(EvaluateDetections, ThreadCountDoesNotChangeResults) {
  const std::vector<ImageRecord> data = RandomDataset(62, 40, BoxKind::kOriented);
  const std::vector<double> thr{0.5};
  const EvalResult a = evaluate_detections(data, thr, {BoxKind::kOriented, {}, 1});
  const EvalResult b = evaluate_detections(data, thr, {BoxKind::kOriented, {}, 4});
  EXPECT_EQ(a.map, b.map);
}

TEST(EvaluateDetections, InvariantUnderMonotoneScoreTransform) {
  std::vector<ImageRecord> data = RandomDataset(63, 30, BoxKind::kAxis);
  const std::vector<double> thr{0.5};
  const EvalResult a = evaluate_detections(data, thr);
  for (ImageRecord& r : data) {
    for (Detection& d : r.dets) d.score = 0.1 + 0.8 * d.score * d.score * d.score;
  }
  EXPECT_EQ(evaluate_detections(data, thr).map, a.map);
}

TEST(EvaluateDetections, LowScoreFalsePositiveNeverHelps) {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ImageRecord> data = RandomDataset(640 + trial, 8, BoxKind::kAxis);
    const std::vector<double> thr{0.5};
    const double before = evaluate_detections(data, thr).entry(ClassLabel::kGun, 0).ap.value_or(0);
    data[0].dets.push_back(Det(ClassLabel::kGun, 0.0, {500, 500, 510, 510}));
    const double after = evaluate_detections(data, thr).entry(ClassLabel::kGun, 0).ap.value_or(0);
    EXPECT_LE(after, before);
  }
}

TEST(EvaluateDetections, AxisAndOrientedAgreeAtZeroAngle) {
  std::vector<ImageRecord> axis;
  std::vector<ImageRecord> oriented;
  std::mt19937_64 rng(65);
  std::uniform_real_distribution<double> u(0, 50);
  std::uniform_real_distribution<double> s(0, 1);
  for (int i = 0; i < 20; ++i) {
    ImageRecord a{"i" + std::to_string(i), {}, {}};
    for (int k = 0; k < 3; ++k) {
      const double x = u(rng), y = u(rng);
      a.gts.push_back(Gt(k % 2 ? ClassLabel::kGun : ClassLabel::kRifle, {x, y, x + 8, y + 5}));
      const double dx = u(rng) / 10;
      a.dets.push_back(Det(a.gts.back().cls, s(rng), {x + dx, y, x + dx + 8, y + 5}));
    }
    ImageRecord o = a;
    for (Detection& d : o.dets) d.box = rotate_aabb(std::get<AxisAlignedBox>(d.box), 0);
    axis.push_back(a);
    oriented.push_back(o);
  }
  const std::vector<double> thr{0.4, 0.6};
  const EvalResult ra = evaluate_detections(axis, thr);
  const EvalResult ro = evaluate_detections(oriented, thr, {BoxKind::kOriented, GtSource::kRotatedOnly});
  for (std::size_t t = 0; t < thr.size(); ++t) {
    ASSERT_TRUE(ra.map[t].has_value());
    EXPECT_NEAR(*ra.map[t], *ro.map[t], 1e-12);
  }
}

TEST(EvaluateDetections, GroundTruthSources) {
  GroundTruthInstance g = Gt(ClassLabel::kGun, {0, 0, 10, 4}, 90);
  EXPECT_EQ(std::get<OrientedBox>(ground_truth_box(g, BoxKind::kOriented, GtSource::kAnnotatedElseRotated)),
            rotate_aabb(g.aabb, 90));
  EXPECT_EQ(std::get<AxisAlignedBox>(ground_truth_box(g, BoxKind::kAxis, GtSource::kAnnotatedOnly)),
            g.aabb);
  std::vector<ImageRecord> data{{"needs_obb", {g}, {}}};
  const std::vector<double> thr{0.5};
  try {
    evaluate_detections(data, thr, {BoxKind::kOriented, GtSource::kAnnotatedOnly});
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("needs_obb"), std::string::npos);
  }
  g.obb_ann = OrientedBox{5, 2, 2, 5, 90};
  data[0].gts = {g};
  EXPECT_NO_THROW(evaluate_detections(data, thr, {BoxKind::kOriented, GtSource::kAnnotatedOnly}));
}

TEST(EvaluateDetections, RejectsBadInput) {
  std::vector<ImageRecord> data{{"x", {Gt(ClassLabel::kGun, {0, 0, 1, 1})},
                                 {{ClassLabel::kGun, 0.5, OrientedBox{0, 0, 1, 1, 0}}}}};
  const std::vector<double> good{0.5};
  const std::vector<double> bad{0.0};
  EXPECT_THROW(evaluate_detections(data, good), InvalidInput);
  data[0].dets.clear();
  EXPECT_THROW(evaluate_detections(data, bad), InvalidInput);
  const EvalResult r = evaluate_detections(data, good);
  EXPECT_EQ(r.entry(ClassLabel::kGun, 0).ap, 0.0);
  EXPECT_FALSE(r.entry(ClassLabel::kRifle, 0).ap.has_value());
  EXPECT_EQ(r.map[0], 0.0);
}

TEST(ConfidenceSweep, Examples) {
  std::vector<ImageRecord> perfect{{"p", {Gt(ClassLabel::kGun, {0, 0, 5, 5})},
                                    {Det(ClassLabel::kGun, 1.0, {0, 0, 5, 5})}}};
  const std::vector<double> levels{0.5, 0.9};
  const std::vector<SweepPoint> a = confidence_sweep(perfect, levels);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1].map, 1.0);
  EXPECT_EQ(a[1].kept, 1u);
  perfect[0].dets[0].score = 0.4;
  const std::vector<SweepPoint> b = confidence_sweep(perfect, levels);
  EXPECT_EQ(b[0].map, 0.0);
  EXPECT_EQ(b[0].kept, 0u);
  EXPECT_THROW(confidence_sweep(perfect, std::vector<double>{0.5, 0.5}), InvalidInput);
  EXPECT_THROW(confidence_sweep(perfect, std::vector<double>{1.0}), InvalidInput);
}

TEST(ConfidenceSweep, MatchesReferencePerLevel) {
  const std::vector<ImageRecord> data = RandomDataset(66, 50, BoxKind::kOriented);
  const std::vector<double> levels{0.1, 0.3, 0.5, 0.7, 0.9};
  const std::vector<SweepPoint> sweep = confidence_sweep(data, levels, {BoxKind::kOriented});
  std::size_t prev_kept = SIZE_MAX;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::vector<ImageRecord> filtered = data;
    std::size_t kept = 0;
    for (ImageRecord& r : filtered) {
      std::erase_if(r.dets, [&](const Detection& d) { return d.score < levels[i]; });
      kept += r.dets.size();
    }
    EXPECT_EQ(sweep[i].kept, kept);
    EXPECT_EQ(sweep[i].map, oracle::reference_map(filtered, kSweepIou, BoxKind::kOriented));
    EXPECT_LE(kept, prev_kept);
    prev_kept = kept;
  }
}

}  // namespace
}  // namespace obbkit
