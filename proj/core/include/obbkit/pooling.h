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

#ifndef OBBKIT_POOLING_H_
#define OBBKIT_POOLING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "obbkit/geometry.h"

namespace obbkit {

// Dense H x W x C grid of features, channel-last. Cell (y, x) sits at the
// continuous coordinate (x, y); its footprint is [x - 0.5, x + 0.5].
class FeatureGrid {
 public:
  // Throws InvalidInput if any dimension is < 1.
  FeatureGrid(int height, int width, int channels, float fill = 0.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }

  float at(int y, int x, int c) const { return values_[index(y, x, c)]; }
  float& at(int y, int x, int c) { return values_[index(y, x, c)]; }

  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_;
  int width_;
  int channels_;
  std::vector<float> values_;
};

// Fixed-size pooled output, gh x gw x C channel-last. For oriented pooling,
// columns run along the proposal's longitudinal axis and rows along its
// lateral axis, so an upright proposal gives the familiar (y, x) layout.
struct PooledPatch {
  int gh = 0;
  int gw = 0;
  int channels = 0;
  std::vector<float> values;

  float at(int row, int col, int c) const {
    return values[(static_cast<std::size_t>(row) * gw + col) * channels + c];
  }
};

inline constexpr int kDefaultPoolSize = 7;

// Bilinear interpolation of channel c at continuous (x, y); coordinates
// outside the grid clamp to the border. Throws InvalidInput on a bad channel
// or non-finite coordinate.
float bilinear_sample(const FeatureGrid& fm, double x, double y, int c);

// Max over 2 x 2 bilinear samples in each of gh x gw axis-aligned cells.
// Throws InvalidInput if the box misses the grid or gh/gw < 1.
PooledPatch roi_pool(const FeatureGrid& fm, const AxisAlignedBox& box,
                     int gh = kDefaultPoolSize, int gw = kDefaultPoolSize);

// Same reduction over a grid laid out on the oriented proposal. Throws
// InvalidInput if the proposal misses the grid or gh/gw < 1.
PooledPatch oaroi_pool(const FeatureGrid& fm, const OrientedBox& orp,
                       int gh = kDefaultPoolSize, int gw = kDefaultPoolSize);

// As oaroi_pool, writing into `out` (size gh * gw * channels). Avoids
// allocation on the hot path.
void oaroi_pool_into(const FeatureGrid& fm, const OrientedBox& orp, int gh, int gw,
                     std::span<float> out);

}  // namespace obbkit

#endif  // OBBKIT_POOLING_H_
