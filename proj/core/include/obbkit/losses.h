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

#ifndef OBBKIT_LOSSES_H_
#define OBBKIT_LOSSES_H_

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "obbkit/geometry.h"
#include "obbkit/orientation.h"
#include "obbkit/types.h"

// Target assignment, the box-delta codec, and the two-stage loss suite with
// analytic gradients.
//
// Classification terms are negative log-likelihoods. Every term is summed
// over proposals and divided by the batch size (see batch_reduce()).

namespace obbkit {

// (dx, dy, dw, dh): center offsets normalized by the anchor size and log
// size ratios.
using BoxDeltas = std::array<double, 4>;

BoxDeltas encode_box_deltas(const AxisAlignedBox& anchor, const AxisAlignedBox& gt);

// Throws NumericError if exp() overflows or the result is not a valid box.
AxisAlignedBox apply_box_deltas(const AxisAlignedBox& anchor, const BoxDeltas& deltas);

double smooth_l1(double x);
double smooth_l1_grad(double x);

struct LossWeights {
  double alpha = 1.0;  // object classification
  double beta = 0.1;   // orientation classification
  double gamma = 1.0;  // box regression
  double eta = 1.0;    // orientation offset regression
};

struct Stage1Target {
  ClassLabel cls = ClassLabel::kBackground;
  BoxDeltas deltas{};
  OrientationLabel orient;
  bool delta_ind = false;  // true iff cls is an object class
};

// Also used as the gradient container for stage1_loss_gradient.
struct Stage1Prediction {
  std::array<double, kNumClasses> cls_probs{};
  BoxDeltas deltas{};
  std::vector<double> orient_probs;    // one per orientation bin
  std::vector<double> orient_offsets;  // one per orientation bin
};

struct Stage1Loss {
  double total = 0.0;
  double cls = 0.0;      // unweighted terms
  double orient = 0.0;
  double box = 0.0;
  double offset = 0.0;
};

struct Stage2Target {
  ClassLabel cls = ClassLabel::kBackground;
  BoxDeltas deltas{};
  bool theta_ind = false;  // proposal is at 0 or 90 degrees
};

struct Stage2Prediction {
  std::array<double, kNumClasses> cls_probs{};
  BoxDeltas deltas{};
};

struct Stage2Loss {
  double total = 0.0;
  double cls = 0.0;
  double box = 0.0;
};

enum class AssignmentKind { kForeground, kBackground, kRejected };

inline constexpr double kForegroundIou = 0.5;
inline constexpr double kBackgroundIou = 0.1;

struct Assignment {
  AssignmentKind kind = AssignmentKind::kRejected;
  std::optional<Stage1Target> target;  // empty iff rejected
  int gt_index = -1;                   // best-IoU ground truth, -1 if none
  double max_iou = 0.0;
};

// Max IoU >= 0.5: foreground with the matched class, box deltas and
// orientation code. [0.1, 0.5): background. Below 0.1: rejected.
std::vector<Assignment> assign_stage1_targets(std::span<const AxisAlignedBox> proposals,
                                              std::span<const GroundTruthInstance> gts,
                                              const AngleBinning& binning);

// True when theta is within 1e-6 degrees of 0 or 90 (mod 180).
bool is_axis_aligned_orientation(double theta_deg);

// Stage-2 labels for refined proposals rp2 with angles thetas, using the same
// IoU rules; rejected proposals come back as std::nullopt.
std::vector<std::optional<Stage2Target>> assign_stage2_targets(
    std::span<const AxisAlignedBox> rp2, std::span<const double> thetas,
    std::span<const GroundTruthInstance> gts);

// Mean over the batch. All loss terms reduce through this.
double batch_reduce(double sum, std::size_t batch_size);

// Throws InvalidInput on size mismatch, probability vectors that do not sum
// to 1 (within 1e-6) or have entries outside [0, 1], or bins that disagree
// with the prediction width. Throws NumericError when a target class has
// probability 0 (infinite cross-entropy).
Stage1Loss stage1_loss(std::span<const Stage1Prediction> preds,
                       std::span<const Stage1Target> targets, const LossWeights& w);
Stage2Loss stage2_loss(std::span<const Stage2Prediction> preds,
                       std::span<const Stage2Target> targets);

// d(total)/d(prediction), treating every prediction entry as a free variable.
std::vector<Stage1Prediction> stage1_loss_gradient(std::span<const Stage1Prediction> preds,
                                                   std::span<const Stage1Target> targets,
                                                   const LossWeights& w);
std::vector<Stage2Prediction> stage2_loss_gradient(std::span<const Stage2Prediction> preds,
                                                   std::span<const Stage2Target> targets);

// Structural checks only (sizes, finiteness). Finite-difference probes
// perturb probabilities off the simplex, so these skip the sum-to-one test.
Stage1Loss stage1_loss_unchecked(std::span<const Stage1Prediction> preds,
                                 std::span<const Stage1Target> targets,
                                 const LossWeights& w);
Stage2Loss stage2_loss_unchecked(std::span<const Stage2Prediction> preds,
                                 std::span<const Stage2Target> targets);

// Flat parameter views used by gradient_check.
std::vector<double> flatten(std::span<const Stage1Prediction> preds);
std::vector<Stage1Prediction> unflatten_stage1(std::span<const double> flat,
                                               std::size_t batch, int num_bins);
std::vector<double> flatten(std::span<const Stage2Prediction> preds);
std::vector<Stage2Prediction> unflatten_stage2(std::span<const double> flat,
                                               std::size_t batch);

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

// Central differences with step epsilon against `grad`. Returns the largest
// |analytic - numeric| / max(|analytic|, |numeric|, floor) over all
// coordinates. Throws NumericError on a non-finite evaluation.
double gradient_check(const ScalarFn& loss, const GradientFn& grad,
                      std::span<const double> point, double epsilon = 1e-5,
                      double floor = 1e-8);

}  // namespace obbkit

#endif  // OBBKIT_LOSSES_H_
