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

#include "obbkit/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "obbkit/error.h"
#include "obbkit/orientation.h"

namespace obbkit {
namespace {

// Intersections below this area are slivers produced by rounding on touching
// edges.
constexpr double kSliverArea = 1e-12;

// Quad-by-quad clipping never exceeds 8 vertices; 16 leaves slack for the
// generic path's duplicate points on coincident edges.
constexpr int kMaxClipVertices = 16;

struct ClipBuffer {
  std::array<Point2, kMaxClipVertices> pts;
  int n = 0;
};

// Keeps the part of `in` on the left of the directed edge a->b.
void clip_by_edge(const ClipBuffer& in, Point2 a, Point2 b, ClipBuffer& out) {
  out.n = 0;
  if (in.n == 0) return;
  const Point2 edge = b - a;
  Point2 prev = in.pts[in.n - 1];
  double prev_side = cross(edge, prev - a);
  for (int i = 0; i < in.n; ++i) {
    const Point2 cur = in.pts[i];
    const double cur_side = cross(edge, cur - a);
    const bool cur_in = cur_side >= 0.0;
    const bool prev_in = prev_side >= 0.0;
    if (cur_in != prev_in) {
      const double t = prev_side / (prev_side - cur_side);
      if (out.n < kMaxClipVertices) out.pts[out.n++] = prev + t * (cur - prev);
    }
    if (cur_in && out.n < kMaxClipVertices) out.pts[out.n++] = cur;
    prev = cur;
    prev_side = cur_side;
  }
}

double buffer_area(const ClipBuffer& buf) {
  return polygon_area(std::span<const Point2>(buf.pts.data(), buf.n));
}

double clip_area(std::span<const Point2> subject, std::span<const Point2> clip) {
  if (subject.size() < 3 || clip.size() < 3 ||
      subject.size() > kMaxClipVertices / 2 || clip.size() > kMaxClipVertices / 2) {
    return 0.0;
  }
  ClipBuffer a;
  ClipBuffer b;
  std::copy(subject.begin(), subject.end(), a.pts.begin());
  a.n = static_cast<int>(subject.size());
  ClipBuffer* in = &a;
  ClipBuffer* out = &b;
  for (size_t i = 0; i < clip.size(); ++i) {
    clip_by_edge(*in, clip[i], clip[(i + 1) % clip.size()], *out);
    std::swap(in, out);
    if (in->n == 0) return 0.0;
  }
  const double area = buffer_area(*in);
  return area < kSliverArea ? 0.0 : area;
}

void require_valid(const AxisAlignedBox& box, const char* what) {
  if (!box.valid()) {
    throw InvalidInput(std::string(what) + ": degenerate or non-finite axis-aligned box");
  }
}

void require_valid(const OrientedBox& box, const char* what) {
  if (!box.valid()) {
    throw InvalidInput(std::string(what) + ": invalid oriented box");
  }
}

}  // namespace

bool AxisAlignedBox::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min < x_max && y_min < y_max;
}

bool OrientedBox::valid() const {
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(half_len) &&
         std::isfinite(half_wid) && half_len > 0 && half_wid > 0 && theta >= 0 &&
         theta < 180;
}

OrientedBox make_oriented_box(Point2 center, double half_len, double half_wid,
                              double theta_deg) {
  if (!std::isfinite(theta_deg)) throw InvalidInput("non-finite box angle");
  OrientedBox box{center.x, center.y, half_len, half_wid, normalize_angle(theta_deg)};
  require_valid(box, "make_oriented_box");
  return box;
}

OrientedBox rotate_aabb(const AxisAlignedBox& box, double theta_deg) {
  require_valid(box, "rotate_aabb");
  return make_oriented_box(box.center(), box.width() / 2, box.height() / 2, theta_deg);
}

Quad obb_corners(const OrientedBox& box) {
  const auto [s, c] = sincos_deg(box.theta);
  const Point2 u{c * box.half_len, s * box.half_len};
  const Point2 v{-s * box.half_wid, c * box.half_wid};
  const Point2 ctr = box.center();
  return {ctr - u - v, ctr + u - v, ctr + u + v, ctr - u + v};
}

Point2 centroid(const Quad& corners) {
  Point2 sum;
  for (const Point2& p : corners) sum = sum + p;
  return 0.25 * sum;
}

OrientedBox obb_from_corners(const Quad& q, double rel_tol) {
  for (const Point2& p : q) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidInput("obb_from_corners: non-finite corner");
    }
  }
  const Point2 e01 = q[1] - q[0];
  const Point2 e12 = q[2] - q[1];
  const Point2 e32 = q[2] - q[3];
  const Point2 e03 = q[3] - q[0];
  const double l01 = std::hypot(e01.x, e01.y);
  const double l12 = std::hypot(e12.x, e12.y);
  const double l32 = std::hypot(e32.x, e32.y);
  const double l03 = std::hypot(e03.x, e03.y);
  const double scale = std::max({l01, l12, l32, l03});
  if (!(scale > 0)) throw InvalidInput("obb_from_corners: degenerate quadrilateral");
  const double tol = rel_tol * scale;
  // Opposite edges equal and adjacent edges perpendicular.
  const Point2 d1 = e01 - e32;
  const Point2 d2 = e12 - e03;
  if (std::hypot(d1.x, d1.y) > tol || std::hypot(d2.x, d2.y) > tol ||
      std::abs(dot(e01, e12)) > tol * scale) {
    throw InvalidInput("obb_from_corners: corners do not form a rectangle");
  }
  const Point2 axis = e01 + e32;
  const double theta = std::atan2(axis.y, axis.x) * 180.0 / std::numbers::pi;
  return make_oriented_box(centroid(q), (l01 + l32) / 4, (l12 + l03) / 4, theta);
}

double polygon_area(std::span<const Point2> polygon) {
  const size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (size_t i = 0; i < n; ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % n]);
  }
  return twice / 2;
}

double convex_intersection_area(std::span<const Point2> subject,
                                std::span<const Point2> clip) {
  return clip_area(subject, clip);
}

double iou_aabb(const AxisAlignedBox& a, const AxisAlignedBox& b) {
  require_valid(a, "iou_aabb");
  require_valid(b, "iou_aabb");
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

double intersection_area(const OrientedBox& a, const OrientedBox& b) {
  require_valid(a, "intersection_area");
  require_valid(b, "intersection_area");
  const double dx = a.cx - b.cx;
  const double dy = a.cy - b.cy;
  const double ra = std::hypot(a.half_len, a.half_wid);
  const double rb = std::hypot(b.half_len, b.half_wid);
  if (dx * dx + dy * dy >= (ra + rb) * (ra + rb)) return 0.0;
  const Quad qa = obb_corners(a);
  const Quad qb = obb_corners(b);
  return clip_area(qa, qb);
}

double iou_obb(const OrientedBox& a, const OrientedBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

AxisAlignedBox enclosing_aabb(const OrientedBox& box) {
  require_valid(box, "enclosing_aabb");
  const Quad q = obb_corners(box);
  AxisAlignedBox out{q[0].x, q[0].y, q[0].x, q[0].y};
  for (const Point2& p : q) {
    out.x_min = std::min(out.x_min, p.x);
    out.y_min = std::min(out.y_min, p.y);
    out.x_max = std::max(out.x_max, p.x);
    out.y_max = std::max(out.y_max, p.y);
  }
  return out;
}

}  // namespace obbkit
