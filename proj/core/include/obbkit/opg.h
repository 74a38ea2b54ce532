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

#ifndef OBBKIT_OPG_H_
#define OBBKIT_OPG_H_

#include <array>

#include "obbkit/geometry.h"

// Oriented proposal generation: from an axis-aligned proposal and a predicted
// angle, build an oriented proposal aligned with the object, and map boxes
// regressed in the proposal's rotated frame back to image coordinates.

namespace obbkit {

struct OrientedProposal {
  OrientedBox orp;
  AxisAlignedBox source_rp2;
  double theta = 0.0;  // degrees, [0, 180); equals orp.theta
};

// Largest-area rectangle whose longitudinal axis is at theta and which lies
// inside `box`. It is centered on the box. Angles within 1e-6 degrees of an
// axis snap to it.
OrientedBox max_inscribed_rect(const AxisAlignedBox& box, double theta_deg);

// The inscribed rectangle above, stretched along its longitudinal axis to the
// projection of `rp2` onto that axis: half_len = (W|cos| + H|sin|) / 2, so
// the midpoints of both end edges lie on corners of rp2. At 0 and 90 degrees
// the result covers rp2 exactly.
OrientedProposal make_orp(const AxisAlignedBox& rp2, double theta_deg);

using Mat3 = std::array<std::array<double, 3>, 3>;

// Homogeneous transform taking the proposal's rotated frame back to the
// image: rotation by theta about the center of rp2.
Mat3 inverse_transform_matrix(double theta_deg, const AxisAlignedBox& rp2);

// Maps `local_box`, expressed in the rotated frame of rp2, to its four image
// corners. Columns follow the homogeneous corner matrix
//   (u_min, v_min), (u_max, v_min), (u_min, v_max), (u_max, v_max).
// Use to_cyclic() for polygon order.
Quad inverse_transform(double theta_deg, const AxisAlignedBox& rp2,
                       const AxisAlignedBox& local_box);

// Reorders inverse_transform output into the cyclic order of obb_corners.
inline Quad to_cyclic(const Quad& corner_matrix_order) {
  return {corner_matrix_order[0], corner_matrix_order[1], corner_matrix_order[3],
          corner_matrix_order[2]};
}

// The ORP as an axis-aligned box in its own rotated frame (centered on the
// rp2 center). inverse_transform of this box reproduces the ORP corners.
AxisAlignedBox local_footprint(const OrientedProposal& proposal);

}  // namespace obbkit

#endif  // OBBKIT_OPG_H_
