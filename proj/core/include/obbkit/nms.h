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

#ifndef OBBKIT_NMS_H_
#define OBBKIT_NMS_H_

#include <span>
#include <vector>

#include "obbkit/types.h"

namespace obbkit {

// Greedy non-maximum suppression, run independently per class. Within a
// class, detections are visited by descending score (ties by input order)
// and one is dropped when its IoU with an already kept detection exceeds
// iou_thresh. Returns indices into `dets`, ordered by score then index.
//
// Throws InvalidInput if iou_thresh is not in (0, 1), a detection is invalid,
// or any detection's box is not of `kind`.
std::vector<std::size_t> nms_indices(std::span<const Detection> dets, double iou_thresh,
                                     BoxKind kind);

std::vector<Detection> nms(std::span<const Detection> dets, double iou_thresh,
                           BoxKind kind);

}  // namespace obbkit

#endif  // OBBKIT_NMS_H_
