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
#include <random>

#include "gtest/gtest.h"
#include "obbkit/error.h"

namespace obbkit {
namespace {

TEST(NormalizeAngle, Examples) {
  EXPECT_DOUBLE_EQ(normalize_angle(185), 5);
  EXPECT_DOUBLE_EQ(normalize_angle(0), 0);
  EXPECT_DOUBLE_EQ(normalize_angle(-11), 169);
  EXPECT_DOUBLE_EQ(normalize_angle(180), 0);
  EXPECT_DOUBLE_EQ(normalize_angle(-1e-20), 0);
  EXPECT_DOUBLE_EQ(normalize_angle(540.5), 0.5);
}

TEST(AngleBinning, DefaultEightBins) {
  const AngleBinning b;
  EXPECT_EQ(b.num_bins(), 8);
  EXPECT_DOUBLE_EQ(b.bin_width(), 22.5);
  EXPECT_DOUBLE_EQ(b.half_width(), 11.25);
  ASSERT_EQ(b.mean_angles().size(), 8u);
  for (int k = 0; k < 8; ++k) EXPECT_DOUBLE_EQ(b.mean_angle(k), 22.5 * k);
  EXPECT_THROW(AngleBinning(1), InvalidInput);
  EXPECT_THROW(b.mean_angle(8), InvalidInput);
}

TEST(EncodeOrientation, Examples) {
  const AngleBinning b(8);
  EXPECT_EQ(encode_orientation(0, b), (OrientationLabel{0, 0.0}));
  const OrientationLabel l30 = encode_orientation(30, b);
  EXPECT_EQ(l30.bin, 1);
  EXPECT_NEAR(l30.offset, 2.0 / 3.0, 1e-12);
  const OrientationLabel l185 = encode_orientation(185, b);
  EXPECT_EQ(l185.bin, 0);
  EXPECT_NEAR(l185.offset, 5.0 / 11.25, 1e-12);
}

TEST(EncodeOrientation, NearHalfTurnWrapsToBinZero) {
  const AngleBinning b(8);
  const OrientationLabel l = encode_orientation(175, b);
  EXPECT_EQ(l.bin, 0);
  EXPECT_NEAR(l.offset, -5.0 / 11.25, 1e-12);
}

TEST(EncodeOrientation, BoundaryGoesToLowerBinWithPlusOne) {
  const AngleBinning b(8);
  EXPECT_EQ(encode_orientation(11.25, b), (OrientationLabel{0, 1.0}));
  EXPECT_EQ(encode_orientation(33.75, b), (OrientationLabel{1, 1.0}));
  // Class 0 spans 348.75..11.25 (mod 180: 168.75..191.25); 168.75 itself is
  // the top edge of bin 7.
  EXPECT_EQ(encode_orientation(168.75, b), (OrientationLabel{7, 1.0}));
  EXPECT_EQ(encode_orientation(348.75 + 1e-9, b).bin, 0);
  EXPECT_EQ(encode_orientation(191.25 - 1e-9, b).bin, 0);
  EXPECT_EQ(encode_orientation(191.25 + 1e-9, b).bin, 1);
}

TEST(DecodeOrientation, Examples) {
  const AngleBinning b(8);
  EXPECT_DOUBLE_EQ(decode_orientation({0, 0.0}, b), 0.0);
  EXPECT_NEAR(decode_orientation({1, 2.0 / 3.0}, b), 30.0, 1e-12);
  EXPECT_DOUBLE_EQ(decode_orientation({4, -1.0}, b), 78.75);
  EXPECT_DOUBLE_EQ(decode_orientation({0, -0.5}, b), 174.375);
  EXPECT_THROW(decode_orientation({9, 0.0}, b), InvalidInput);
}

class OrientationCodecProperty : public ::testing::TestWithParam<int> {};

TEST_P(OrientationCodecProperty, RoundTripFlipAndRange) {
  const AngleBinning b(GetParam());
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> ang(-720.0, 720.0);
  std::uniform_int_distribution<int> turns(-3, 3);
  for (int i = 0; i < 10000; ++i) {
    const double theta = ang(rng);
    const OrientationLabel l = encode_orientation(theta, b);
    ASSERT_GE(l.bin, 0);
    ASSERT_LT(l.bin, b.num_bins());
    ASSERT_LE(std::abs(l.offset), 1.0 + 1e-9);
    const double back = decode_orientation(l, b);
    ASSERT_NEAR(std::abs(angle_difference(back, theta)), 0.0, 1e-9) << theta;
    const OrientationLabel flipped = encode_orientation(theta + 180.0 * turns(rng), b);
    ASSERT_EQ(flipped.bin, l.bin);
    ASSERT_NEAR(flipped.offset, l.offset, 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(BinCounts, OrientationCodecProperty, ::testing::Values(2, 4, 8, 12));

TEST(SinCosDeg, ExactOnAxes) {
  EXPECT_EQ(sincos_deg(90).cos, 0.0);
  EXPECT_EQ(sincos_deg(90).sin, 1.0);
  EXPECT_EQ(sincos_deg(-90).sin, -1.0);
  EXPECT_EQ(sincos_deg(180).cos, -1.0);
  EXPECT_NEAR(sincos_deg(30).sin, 0.5, 1e-15);
}

}  // namespace
}  // namespace obbkit
