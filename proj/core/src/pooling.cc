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

#include "obbkit/pooling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "obbkit/error.h"
#include "obbkit/orientation.h"

namespace obbkit {
namespace {

// Sample positions inside a cell, as fractions of the cell extent.
constexpr std::array<double, 2> kSampleFractions{0.25, 0.75};

struct BilinearTap {
  std::size_t i00, i01, i10, i11;  // element offsets of channel 0
  float fx, fy;
};

// Nested lerps keep constant regions exactly constant.
inline float interpolate(const BilinearTap& t, const float* v) {
  const float top = v[t.i00] + t.fx * (v[t.i01] - v[t.i00]);
  const float bottom = v[t.i10] + t.fx * (v[t.i11] - v[t.i10]);
  return top + t.fy * (bottom - top);
}

BilinearTap make_tap(const FeatureGrid& fm, double x, double y) {
  const double xc = std::clamp(x, 0.0, static_cast<double>(fm.width() - 1));
  const double yc = std::clamp(y, 0.0, static_cast<double>(fm.height() - 1));
  const int x0 = static_cast<int>(std::floor(xc));
  const int y0 = static_cast<int>(std::floor(yc));
  const int x1 = std::min(x0 + 1, fm.width() - 1);
  const int y1 = std::min(y0 + 1, fm.height() - 1);
  const double fx = xc - x0;
  const double fy = yc - y0;
  const std::size_t cs = fm.channels();
  const std::size_t row0 = static_cast<std::size_t>(y0) * fm.width();
  const std::size_t row1 = static_cast<std::size_t>(y1) * fm.width();
  return {(row0 + x0) * cs,
          (row0 + x1) * cs,
          (row1 + x0) * cs,
          (row1 + x1) * cs,
          static_cast<float>(fx),
          static_cast<float>(fy)};
}

void check_grid_size(int gh, int gw) {
  if (gh < 1 || gw < 1) {
    throw InvalidInput("pooling grid must be at least 1x1, got " + std::to_string(gh) +
                       "x" + std::to_string(gw));
  }
}

bool misses_grid(const FeatureGrid& fm, const AxisAlignedBox& extent) {
  return extent.x_max < -0.5 || extent.y_max < -0.5 ||
         extent.x_min > fm.width() - 0.5 || extent.y_min > fm.height() - 0.5;
}

}  // namespace

FeatureGrid::FeatureGrid(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw InvalidInput("feature grid dimensions must be >= 1");
  }
  values_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

float bilinear_sample(const FeatureGrid& fm, double x, double y, int c) {
  if (c < 0 || c >= fm.channels()) {
    throw InvalidInput("channel " + std::to_string(c) + " out of range");
  }
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw InvalidInput("non-finite sample coordinate");
  }
  const BilinearTap t = make_tap(fm, x, y);
  return interpolate(t, fm.values().data() + c);
}

void oaroi_pool_into(const FeatureGrid& fm, const OrientedBox& orp, int gh, int gw,
                     std::span<float> out) {
  check_grid_size(gh, gw);
  if (!orp.valid()) throw InvalidInput("oaroi_pool: invalid oriented box");
  if (misses_grid(fm, enclosing_aabb(orp))) {
    throw InvalidInput("oaroi_pool: proposal lies entirely outside the feature grid");
  }
  const std::size_t cs = fm.channels();
  if (out.size() != static_cast<std::size_t>(gh) * gw * cs) {
    throw InvalidInput("oaroi_pool: output buffer has the wrong size");
  }
  const auto [s, c] = sincos_deg(orp.theta);
  // Longitudinal axis (c, s) spans columns, lateral (-s, c) spans rows.
  const double cell_len = 2 * orp.half_len / gw;
  const double cell_wid = 2 * orp.half_wid / gh;
  const float* v = fm.values().data();
  std::fill(out.begin(), out.end(), -std::numeric_limits<float>::infinity());

  for (int row = 0; row < gh; ++row) {
    for (int col = 0; col < gw; ++col) {
      float* dst = out.data() + (static_cast<std::size_t>(row) * gw + col) * cs;
      for (double fr : kSampleFractions) {
        const double t = -orp.half_wid + (row + fr) * cell_wid;
        for (double fc : kSampleFractions) {
          const double l = -orp.half_len + (col + fc) * cell_len;
          const double x = orp.cx + l * c + t * -s;
          const double y = orp.cy + l * s + t * c;
          const BilinearTap tap = make_tap(fm, x, y);
          for (std::size_t k = 0; k < cs; ++k) {
            dst[k] = std::max(dst[k], interpolate(tap, v + k));
          }
        }
      }
    }
  }
}

PooledPatch oaroi_pool(const FeatureGrid& fm, const OrientedBox& orp, int gh, int gw) {
  check_grid_size(gh, gw);
  PooledPatch patch{gh, gw, fm.channels(), {}};
  patch.values.resize(static_cast<std::size_t>(gh) * gw * fm.channels());
  oaroi_pool_into(fm, orp, gh, gw, patch.values);
  return patch;
}

PooledPatch roi_pool(const FeatureGrid& fm, const AxisAlignedBox& box, int gh, int gw) {
  if (!box.valid()) throw InvalidInput("roi_pool: invalid axis-aligned box");
  if (misses_grid(fm, box)) {
    throw InvalidInput("roi_pool: box lies entirely outside the feature grid");
  }
  // The upright oriented grid visits exactly the axis-aligned sample points.
  return oaroi_pool(fm, rotate_aabb(box, 0.0), gh, gw);
}

}  // namespace obbkit
