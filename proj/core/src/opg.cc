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

#include "obbkit/opg.h"

#include <algorithm>
#include <cmath>

#include "obbkit/error.h"
#include "obbkit/orientation.h"

namespace obbkit {
namespace {

constexpr double kSnapDeg = 1e-6;

// Snaps angles within kSnapDeg of 0 or 90 onto the axis; input in [0, 180).
double snap_axis_angle(double t) {
  if (t < kSnapDeg || t > 180.0 - kSnapDeg) return 0.0;
  if (std::abs(t - 90.0) < kSnapDeg) return 90.0;
  return t;
}

void require_valid(const AxisAlignedBox& box, const char* what) {
  if (!box.valid()) {
    throw InvalidInput(std::string(what) + ": degenerate or non-finite axis-aligned box");
  }
}

double prepare_angle(double theta_deg) {
  if (!std::isfinite(theta_deg)) throw InvalidInput("non-finite proposal angle");
  return snap_axis_angle(normalize_angle(theta_deg));
}

// Side lengths (along the longitudinal, lateral axes) of the largest centered
// rectangle at the given |cos|, |sin| inside a W x H box. Containment of a
// centered rectangle with sides a, b:
//   a*C + b*S <= W,   a*S + b*C <= H.
// log(ab) is concave, so the optimum has one or both constraints active.
std::pair<double, double> inscribed_sides(double w, double h, double c, double s) {
  if (s == 0.0) return {w, h};
  if (c == 0.0) return {h, w};
  double best_a = 0.0;
  double best_b = 0.0;
  auto consider = [&](double a, double b) {
    if (a <= 0 || b <= 0) return;
    // Small slack for rounding in the feasibility test only.
    const double slack = 1e-12 * std::max(w, h);
    if (a * c + b * s > w + slack || a * s + b * c > h + slack) return;
    if (a * b > best_a * best_b) {
      best_a = a;
      best_b = b;
    }
  };
  consider(w / (2 * c), w / (2 * s));  // only the width constraint active
  consider(h / (2 * s), h / (2 * c));  // only the height constraint active
  const double det = c * c - s * s;
  if (std::abs(det) > 1e-12) {
    consider((w * c - h * s) / det, (h * c - w * s) / det);
  }
  return {best_a, best_b};
}

}  // namespace

OrientedBox max_inscribed_rect(const AxisAlignedBox& box, double theta_deg) {
  require_valid(box, "max_inscribed_rect");
  const double theta = prepare_angle(theta_deg);
  const auto [s, c] = sincos_deg(theta);
  const auto [a, b] = inscribed_sides(box.width(), box.height(), std::abs(c), std::abs(s));
  if (!(a > 0 && b > 0)) {
    throw InvalidInput("max_inscribed_rect: no inscribed rectangle");
  }
  OrientedBox out;
  out.cx = box.center().x;
  out.cy = box.center().y;
  out.half_len = a / 2;
  out.half_wid = b / 2;
  out.theta = theta;
  return out;
}

OrientedProposal make_orp(const AxisAlignedBox& rp2, double theta_deg) {
  const OrientedBox inscribed = max_inscribed_rect(rp2, theta_deg);
  const double theta = inscribed.theta;
  const auto [s, c] = sincos_deg(theta);
  OrientedBox orp = inscribed;
  orp.half_len = (rp2.width() * std::abs(c) + rp2.height() * std::abs(s)) / 2;
  return {orp, rp2, theta};
}

Mat3 inverse_transform_matrix(double theta_deg, const AxisAlignedBox& rp2) {
  if (!std::isfinite(theta_deg)) throw InvalidInput("non-finite proposal angle");
  require_valid(rp2, "inverse_transform");
  const auto [s, c] = sincos_deg(theta_deg);
  const Point2 ctr = rp2.center();
  return {{{c, -s, ctr.x - c * ctr.x + s * ctr.y},
           {s, c, ctr.y - s * ctr.x - c * ctr.y},
           {0.0, 0.0, 1.0}}};
}

Quad inverse_transform(double theta_deg, const AxisAlignedBox& rp2,
                       const AxisAlignedBox& local_box) {
  require_valid(local_box, "inverse_transform");
  const Mat3 t = inverse_transform_matrix(theta_deg, rp2);
  const std::array<Point2, 4> local{{{local_box.x_min, local_box.y_min},
                                     {local_box.x_max, local_box.y_min},
                                     {local_box.x_min, local_box.y_max},
                                     {local_box.x_max, local_box.y_max}}};
  Quad out;
  for (size_t k = 0; k < 4; ++k) {
    const Point2 p = local[k];
    out[k] = {t[0][0] * p.x + t[0][1] * p.y + t[0][2],
              t[1][0] * p.x + t[1][1] * p.y + t[1][2]};
  }
  return out;
}

AxisAlignedBox local_footprint(const OrientedProposal& proposal) {
  const Point2 ctr = proposal.source_rp2.center();
  const OrientedBox& o = proposal.orp;
  return {ctr.x - o.half_len, ctr.y - o.half_wid, ctr.x + o.half_len,
          ctr.y + o.half_wid};
}

}  // namespace obbkit
