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

#ifndef OBBKIT_GEOMETRY_H_
#define OBBKIT_GEOMETRY_H_

#include <array>
#include <span>

// Box types and rotated-rectangle overlap.
//
// Frame: image convention, x to the right and y downward, in pixels. An
// angle theta (degrees) rotates the +x axis by the matrix
//   [cos -sin]
//   [sin  cos]
// so the longitudinal axis of an OrientedBox is (cos theta, sin theta) and
// the lateral axis is (-sin theta, cos theta). Boxes that differ by 180
// degrees are the same object; OrientedBox stores theta in [0, 180).

namespace obbkit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

using Quad = std::array<Point2, 4>;

struct AxisAlignedBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  Point2 center() const { return {(x_min + x_max) / 2, (y_min + y_max) / 2}; }

  // x_min < x_max, y_min < y_max, all finite.
  bool valid() const;

  friend bool operator==(const AxisAlignedBox&, const AxisAlignedBox&) = default;
};

struct OrientedBox {
  double cx = 0.0;
  double cy = 0.0;
  double half_len = 0.0;  // along (cos theta, sin theta)
  double half_wid = 0.0;  // along (-sin theta, cos theta)
  double theta = 0.0;     // degrees, [0, 180)

  Point2 center() const { return {cx, cy}; }
  double area() const { return 4.0 * half_len * half_wid; }

  // Positive finite extents and 0 <= theta < 180.
  bool valid() const;

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;
};

// Builds an OrientedBox with theta normalized into [0, 180). Throws
// InvalidInput on non-positive or non-finite extents.
OrientedBox make_oriented_box(Point2 center, double half_len, double half_wid,
                              double theta_deg);

// Rotates `box` about its own center by theta. half_len is half the x extent
// of the input and half_wid half the y extent.
OrientedBox rotate_aabb(const AxisAlignedBox& box, double theta_deg);

// Corners in cyclic order (-l,-w), (+l,-w), (+l,+w), (-l,+w) in the box's
// local (longitudinal, lateral) frame. The order has positive shoelace area.
Quad obb_corners(const OrientedBox& box);

// Inverse of obb_corners for any cyclic corner order in which edge 0->1 runs
// along the longitudinal axis. Throws InvalidInput when the quadrilateral is
// not a rectangle within `rel_tol` (relative to its longest edge).
OrientedBox obb_from_corners(const Quad& corners, double rel_tol = 1e-3);

Point2 centroid(const Quad& corners);

double iou_aabb(const AxisAlignedBox& a, const AxisAlignedBox& b);
double iou_obb(const OrientedBox& a, const OrientedBox& b);

// Area of the intersection of two rotated rectangles.
double intersection_area(const OrientedBox& a, const OrientedBox& b);

AxisAlignedBox enclosing_aabb(const OrientedBox& box);

// Signed shoelace area; positive for the orientation used by obb_corners.
double polygon_area(std::span<const Point2> polygon);

// Area of the intersection of two convex polygons given with positive
// orientation (Sutherland-Hodgman clipping of `subject` by `clip`).
double convex_intersection_area(std::span<const Point2> subject,
                                std::span<const Point2> clip);

}  // namespace obbkit

#endif  // OBBKIT_GEOMETRY_H_
