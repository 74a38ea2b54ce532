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

#include "obbkit/types.h"

#include <cmath>

#include "obbkit/error.h"

namespace obbkit {

std::string_view to_string(ClassLabel c) {
  switch (c) {
    case ClassLabel::kBackground:
      return "background";
    case ClassLabel::kGun:
      return "gun";
    case ClassLabel::kRifle:
      return "rifle";
  }
  return "unknown";
}

std::optional<ClassLabel> parse_class_label(std::string_view name) {
  if (name == "background") return ClassLabel::kBackground;
  if (name == "gun") return ClassLabel::kGun;
  if (name == "rifle") return ClassLabel::kRifle;
  return std::nullopt;
}

std::string_view to_string(BoxKind k) {
  return k == BoxKind::kAxis ? "axis" : "oriented";
}

std::optional<BoxKind> parse_box_kind(std::string_view name) {
  if (name == "axis") return BoxKind::kAxis;
  if (name == "oriented") return BoxKind::kOriented;
  return std::nullopt;
}

void validate(const Detection& det) {
  if (det.cls == ClassLabel::kBackground) {
    throw InvalidInput("detection class must not be background");
  }
  if (!(det.score >= 0.0 && det.score <= 1.0)) {
    throw InvalidInput("detection score outside [0, 1]");
  }
  const bool ok = std::visit([](const auto& b) { return b.valid(); }, det.box);
  if (!ok) throw InvalidInput("detection box is invalid");
}

double iou(const AnyBox& a, const AnyBox& b) {
  if (a.index() != b.index()) throw InvalidInput("IoU between different box kinds");
  if (const auto* pa = std::get_if<AxisAlignedBox>(&a)) {
    return iou_aabb(*pa, std::get<AxisAlignedBox>(b));
  }
  return iou_obb(std::get<OrientedBox>(a), std::get<OrientedBox>(b));
}

}  // namespace obbkit
