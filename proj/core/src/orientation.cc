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

#include "obbkit/orientation.h"

#include <cmath>
#include <numbers>
#include <string>

#include "obbkit/error.h"

namespace obbkit {

double normalize_angle(double theta_deg) {
  double r = std::fmod(theta_deg, 180.0);
  if (r < 0) r += 180.0;
  // fmod of a tiny negative value can round up to exactly 180.
  if (r >= 180.0) r = 0.0;
  return r;
}

double angle_difference(double a_deg, double b_deg) {
  double d = std::fmod(a_deg - b_deg, 180.0);
  if (d >= 90.0) d -= 180.0;
  if (d < -90.0) d += 180.0;
  return d;
}

SinCos sincos_deg(double theta_deg) {
  double r = std::fmod(theta_deg, 360.0);
  if (r < 0) r += 360.0;
  if (r == 0.0) return {0.0, 1.0};
  if (r == 90.0) return {1.0, 0.0};
  if (r == 180.0) return {0.0, -1.0};
  if (r == 270.0) return {-1.0, 0.0};
  double rad = theta_deg * (std::numbers::pi / 180.0);
  return {std::sin(rad), std::cos(rad)};
}

AngleBinning::AngleBinning(int num_bins) : num_bins_(num_bins) {
  if (num_bins < 2) {
    throw InvalidInput("AngleBinning needs at least 2 bins, got " +
                       std::to_string(num_bins));
  }
  bin_width_ = 180.0 / num_bins;
  mean_angles_.reserve(num_bins);
  for (int k = 0; k < num_bins; ++k) mean_angles_.push_back(k * bin_width_);
}

double AngleBinning::mean_angle(int bin) const {
  if (bin < 0 || bin >= num_bins_) {
    throw InvalidInput("orientation bin " + std::to_string(bin) + " out of range");
  }
  return mean_angles_[bin];
}

OrientationLabel encode_orientation(double theta_deg, const AngleBinning& binning) {
  if (!std::isfinite(theta_deg)) throw InvalidInput("non-finite orientation");
  const double t = normalize_angle(theta_deg);
  const double r_m = binning.half_width();
  const int n = binning.num_bins();
  // Boundaries sit at mean + r_m; ceil puts an exact boundary in the lower bin.
  int bin = static_cast<int>(std::ceil((t + r_m) / binning.bin_width())) - 1;
  bin = ((bin % n) + n) % n;
  double offset = angle_difference(t, binning.mean_angle(bin)) / r_m;
  // Rounding in the bin division can land a hair outside the bin.
  if (offset > 1.0 + 1e-12) {
    bin = (bin + 1) % n;
    offset = angle_difference(t, binning.mean_angle(bin)) / r_m;
  } else if (offset < -1.0 - 1e-12) {
    bin = (bin + n - 1) % n;
    offset = angle_difference(t, binning.mean_angle(bin)) / r_m;
  }
  return {bin, offset};
}

double decode_orientation(const OrientationLabel& label, const AngleBinning& binning) {
  if (!std::isfinite(label.offset)) throw InvalidInput("non-finite orientation offset");
  return normalize_angle(binning.mean_angle(label.bin) +
                         binning.half_width() * label.offset);
}

}  // namespace obbkit
