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

#ifndef OBBKIT_EVAL_H_
#define OBBKIT_EVAL_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obbkit/types.h"

namespace obbkit {

// Where oriented ground truth comes from in kind == kOriented evaluation.
enum class GtSource {
  kAnnotatedElseRotated,  // obb_ann when present, else the rotated AABB
  kAnnotatedOnly,         // obb_ann required; missing -> InvalidInput
  kRotatedOnly,           // always the rotated AABB
};

struct EvalOptions {
  BoxKind kind = BoxKind::kAxis;
  GtSource gt_source = GtSource::kAnnotatedElseRotated;
  int num_threads = 1;  // per-image matching; results do not depend on it
};

struct ImageRecord {
  std::string image_id;
  std::vector<GroundTruthInstance> gts;
  std::vector<Detection> dets;
};

// Ground-truth box used for `kind`. Throws InvalidInput naming `image_id`
// when kAnnotatedOnly is requested and the instance has no obb_ann.
AnyBox ground_truth_box(const GroundTruthInstance& gt, BoxKind kind, GtSource source,
                        const std::string& image_id = "");

// Greedy matching for one image: detections in descending score order (ties
// by input order) each take the best-IoU unmatched ground truth of their
// class; a match with IoU >= iou_thresh is a true positive. Returns one flag
// per detection, in input order.
std::vector<bool> match_detections(std::span<const Detection> dets,
                                   std::span<const GroundTruthInstance> gts,
                                   double iou_thresh, BoxKind kind,
                                   GtSource source = GtSource::kAnnotatedElseRotated,
                                   const std::string& image_id = "");

struct ScoredFlag {
  double score = 0.0;
  bool tp = false;
};

// All-point interpolated area under the precision/recall curve. Flags are
// ranked by descending score, ties keeping their given order. Returns
// std::nullopt when n_gt == 0 (AP is undefined and excluded from mAP).
std::optional<double> average_precision(std::span<const ScoredFlag> flags, int n_gt);

struct ClassApEntry {
  ClassLabel cls = ClassLabel::kGun;
  double iou_thresh = 0.5;
  std::optional<double> ap;
  int n_gt = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

inline constexpr std::array<ClassLabel, 2> kObjectClasses{ClassLabel::kGun,
                                                          ClassLabel::kRifle};

struct EvalResult {
  std::vector<double> thresholds;
  // thresholds.size() x kObjectClasses.size(), threshold-major.
  std::vector<ClassApEntry> entries;
  // Mean of the defined per-class APs at each threshold.
  std::vector<std::optional<double>> map;

  const ClassApEntry& entry(ClassLabel cls, std::size_t threshold_index) const;
};

// Pools per-image matches across the dataset for each class and threshold.
// Throws InvalidInput on a detection of the wrong kind, thresholds outside
// (0, 1], or a missing required annotated OBB (message names the image).
EvalResult evaluate_detections(std::span<const ImageRecord> dataset,
                               std::span<const double> thresholds,
                               const EvalOptions& options = {});

struct SweepPoint {
  double level = 0.0;
  std::optional<double> map;
  std::size_t kept = 0;  // detections with score >= level
  EvalResult result;
};

inline constexpr double kSweepIou = 0.5;

// Keeps detections with score >= level and evaluates at IoU 0.5. Levels must
// be strictly increasing inside (0, 1).
std::vector<SweepPoint> confidence_sweep(std::span<const ImageRecord> dataset,
                                         std::span<const double> levels,
                                         const EvalOptions& options = {});

}  // namespace obbkit

#endif  // OBBKIT_EVAL_H_
