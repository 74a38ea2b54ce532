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

#ifndef OBBKIT_TYPES_H_
#define OBBKIT_TYPES_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "obbkit/geometry.h"

namespace obbkit {

enum class ClassLabel : std::uint8_t { kBackground = 0, kGun = 1, kRifle = 2 };

// Number of object classes including background.
inline constexpr int kNumClasses = 3;

inline int class_index(ClassLabel c) { return static_cast<int>(c); }

std::string_view to_string(ClassLabel c);
std::optional<ClassLabel> parse_class_label(std::string_view name);

enum class BoxKind : std::uint8_t { kAxis, kOriented };

std::string_view to_string(BoxKind k);
std::optional<BoxKind> parse_box_kind(std::string_view name);

// One annotated object: its axis-aligned box, continuous orientation, and
// (test split only) a hand-annotated oriented box.
struct GroundTruthInstance {
  ClassLabel cls = ClassLabel::kGun;
  AxisAlignedBox aabb;
  double angle = 0.0;  // degrees
  std::optional<OrientedBox> obb_ann;
};

using AnyBox = std::variant<AxisAlignedBox, OrientedBox>;

struct Detection {
  ClassLabel cls = ClassLabel::kGun;
  double score = 0.0;
  AnyBox box;

  BoxKind kind() const {
    return std::holds_alternative<AxisAlignedBox>(box) ? BoxKind::kAxis
                                                       : BoxKind::kOriented;
  }
};

// Throws InvalidInput unless cls is an object class, score in [0, 1] and the
// box is valid.
void validate(const Detection& det);

// IoU between two boxes of the same kind. Throws InvalidInput on mixed kinds.
double iou(const AnyBox& a, const AnyBox& b);

}  // namespace obbkit

#endif  // OBBKIT_TYPES_H_
