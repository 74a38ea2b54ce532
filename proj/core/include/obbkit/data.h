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

#ifndef OBBKIT_DATA_H_
#define OBBKIT_DATA_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obbkit/eval.h"
#include "obbkit/pooling.h"
#include "obbkit/types.h"

// Annotation and detection files, oriented ground truth from rotated AABBs,
// and deterministic synthetic scenes.
//
// Both file formats are line-delimited JSON, one record per line:
//
//   {"image_id": "img_001", "width": 640, "height": 480,
//    "instances": [{"cls": "gun", "aabb": [x_min, y_min, x_max, y_max],
//                   "angle_deg": 30.0,
//                   "obb_ann": [x0, y0, x1, y1, x2, y2, x3, y3]}]}
//
//   {"image_id": "img_001", "cls": "rifle", "score": 0.93,
//    "kind": "axis" | "oriented", "box": [4 or 8 numbers]}
//
// Oriented boxes are written as four corners in cyclic order: edge 0->1 runs
// along the longitudinal axis and corners 1, 2 form its +longitudinal end
// (the muzzle end for annotated firearms). `obb_ann` is optional.

namespace obbkit {

struct SceneAnnotation {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<GroundTruthInstance> instances;
};

struct AnnotationSet {
  std::vector<SceneAnnotation> scenes;
  int clamped_boxes = 0;  // boxes pulled back inside their image
};

// Throws ParseError (with line number) on malformed JSON or field types, and
// on invariant violations (the message names the image_id).
AnnotationSet parse_annotations(std::istream& in);
AnnotationSet load_annotations(const std::filesystem::path& path);

void write_annotations(std::ostream& out, std::span<const SceneAnnotation> scenes);
void save_annotations(const std::filesystem::path& path,
                      std::span<const SceneAnnotation> scenes);

struct DetectionRecord {
  std::string image_id;
  Detection det;
};

std::vector<DetectionRecord> parse_detections(std::istream& in);
std::vector<DetectionRecord> load_detections(const std::filesystem::path& path);

void write_detections(std::ostream& out, std::span<const DetectionRecord> dets);
void save_detections(const std::filesystem::path& path,
                     std::span<const DetectionRecord> dets);

// Groups detections under their annotated images, keeping only `kind`.
// Throws InvalidInput when a detection names an image with no annotation.
std::vector<ImageRecord> join_dataset(std::span<const SceneAnnotation> scenes,
                                      std::span<const DetectionRecord> dets, BoxKind kind);

// Oriented ground truth made by rotating the annotated AABB by its angle.
OrientedBox obb_rot(const GroundTruthInstance& gt);

// How oracle detections are derived from ground truth. For each instance:
// dropped with probability miss_rate; otherwise shifted along its own axis so
// that IoU with the ground truth is uniform in [min_iou, max_iou], with score
// 1 - score_spread * U(0, 1). Up to n_instances false positives with random
// placement and score are each kept with probability fp_rate. All random
// draws are made regardless of the rates, so raising a rate only adds
// corruption.
struct CorruptionModel {
  double miss_rate = 0.0;
  double fp_rate = 0.0;
  double min_iou = 1.0;
  double max_iou = 1.0;
  double score_spread = 0.0;

  // noise in [0, 1]: miss and FP rates noise/2, IoU in [1 - 0.6 noise, 1],
  // score spread noise/2.
  static CorruptionModel from_noise(double noise);
};

struct SyntheticParams {
  int n_instances = 4;
  double noise = 0.0;
  int size = 128;      // square image / feature grid side, pixels
  int channels = 4;
  int max_attempts = 200;  // placement retries per instance
  std::optional<CorruptionModel> corruption;  // overrides `noise`
  std::string image_id;  // default "scene_<seed>"
};

struct SyntheticScene {
  FeatureGrid features;
  SceneAnnotation annotations;
  // Axis and oriented oracle detections interleaved.
  std::vector<Detection> oracle_detections;
};

// Bar-shaped activations at random angles and positions with non-overlapping
// axis-aligned footprints, their annotations (obb_ann set to the true box),
// and oracle detections for both box kinds. Bit-identical for a given seed.
// Throws InvalidInput on bad parameters or when an instance cannot be placed
// within max_attempts.
SyntheticScene generate_synthetic_scene(std::uint64_t seed, const SyntheticParams& params);

}  // namespace obbkit

#endif  // OBBKIT_DATA_H_
