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

#ifndef OBBKIT_ORIENTATION_H_
#define OBBKIT_ORIENTATION_H_

#include <vector>

namespace obbkit {

// Reduces theta modulo 180 into [0, 180). A box and its 180-degree flip are
// the same object.
double normalize_angle(double theta_deg);

// Periodic (mod 180) signed difference a - b in [-90, 90).
double angle_difference(double a_deg, double b_deg);

struct SinCos {
  double sin;
  double cos;
};

// sin/cos of an angle in degrees. Exact (0, +-1) at multiples of 90 degrees.
SinCos sincos_deg(double theta_deg);

// Quantization of [0, 180) into `num_bins` equal bins centered on
// k * bin_width. r_m (half_width) normalizes the orientation offset.
class AngleBinning {
 public:
  // Throws InvalidInput if num_bins < 2.
  explicit AngleBinning(int num_bins = 8);

  int num_bins() const { return num_bins_; }
  double bin_width() const { return bin_width_; }
  double half_width() const { return bin_width_ / 2; }
  double mean_angle(int bin) const;
  const std::vector<double>& mean_angles() const { return mean_angles_; }

 private:
  int num_bins_;
  double bin_width_;
  std::vector<double> mean_angles_;
};

struct OrientationLabel {
  int bin = 0;
  double offset = 0.0;  // in [-1, 1], units of half_width

  friend bool operator==(const OrientationLabel&, const OrientationLabel&) = default;
};

// Bin of the nearest mean angle (180-periodic) and the normalized offset
// (theta - mean) / r_m. The sign is chosen so that decode_orientation recovers
// theta. An angle exactly on a boundary goes to the bin below it with
// offset +1.
OrientationLabel encode_orientation(double theta_deg, const AngleBinning& binning);

// mean_angle(bin) + r_m * offset, normalized into [0, 180). Throws
// InvalidInput on an out-of-range bin or non-finite offset.
double decode_orientation(const OrientationLabel& label, const AngleBinning& binning);

}  // namespace obbkit

#endif  // OBBKIT_ORIENTATION_H_
