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
#include <numeric>

#include "obbkit/error.h"

namespace obbkit {

std::vector<std::size_t> nms_indices(std::span<const Detection> dets, double iou_thresh,
                                     BoxKind kind) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) {
    throw InvalidInput("nms: iou_thresh must lie in (0, 1)");
  }
  for (const Detection& d : dets) {
    validate(d);
    if (d.kind() != kind) throw InvalidInput("nms: detections of mixed box kinds");
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  std::vector<std::size_t> kept;
  std::vector<bool> suppressed(dets.size(), false);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i]) continue;
    kept.push_back(i);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (suppressed[j] || dets[j].cls != dets[i].cls) continue;
      if (iou(dets[i].box, dets[j].box) > iou_thresh) suppressed[j] = true;
    }
  }
  return kept;
}

std::vector<Detection> nms(std::span<const Detection> dets, double iou_thresh,
                           BoxKind kind) {
  std::vector<Detection> out;
  for (std::size_t i : nms_indices(dets, iou_thresh, kind)) out.push_back(dets[i]);
  return out;
}

}  // namespace obbkit
