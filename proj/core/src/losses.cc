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

#include "obbkit/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "obbkit/error.h"

namespace obbkit {
namespace {

constexpr double kProbSumTol = 1e-6;
constexpr double kAxisTolDeg = 1e-6;

void check_probabilities(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidInput(std::string(what) + ": probability outside [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbSumTol) {
    throw InvalidInput(std::string(what) + ": probabilities sum to " + std::to_string(sum));
  }
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite value");
  }
}

double neg_log(double p) {
  if (!(p > 0.0)) throw NumericError("cross-entropy: target class has probability 0");
  return -std::log(p);
}

int class_of(ClassLabel c) { return class_index(c); }

void check_stage1_shapes(std::span<const Stage1Prediction> preds,
                         std::span<const Stage1Target> targets) {
  if (preds.size() != targets.size()) {
    throw InvalidInput("stage1_loss: " + std::to_string(preds.size()) +
                       " predictions vs " + std::to_string(targets.size()) + " targets");
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Stage1Prediction& p = preds[i];
    const Stage1Target& t = targets[i];
    if (p.orient_probs.size() != p.orient_offsets.size() || p.orient_probs.size() < 2) {
      throw InvalidInput("stage1_loss: orientation heads disagree in width");
    }
    if (t.delta_ind != (t.cls != ClassLabel::kBackground)) {
      throw InvalidInput("stage1_loss: delta indicator inconsistent with class");
    }
    if (t.delta_ind &&
        (t.orient.bin < 0 || t.orient.bin >= static_cast<int>(p.orient_probs.size()))) {
      throw InvalidInput("stage1_loss: target orientation bin out of range");
    }
    check_finite(p.cls_probs, "stage1_loss");
    check_finite(p.deltas, "stage1_loss");
    check_finite(p.orient_probs, "stage1_loss");
    check_finite(p.orient_offsets, "stage1_loss");
  }
}

void check_stage2_shapes(std::span<const Stage2Prediction> preds,
                         std::span<const Stage2Target> targets) {
  if (preds.size() != targets.size()) {
    throw InvalidInput("stage2_loss: " + std::to_string(preds.size()) +
                       " predictions vs " + std::to_string(targets.size()) + " targets");
  }
  for (const Stage2Prediction& p : preds) {
    check_finite(p.cls_probs, "stage2_loss");
    check_finite(p.deltas, "stage2_loss");
  }
}

}  // namespace

BoxDeltas encode_box_deltas(const AxisAlignedBox& anchor, const AxisAlignedBox& gt) {
  if (!anchor.valid() || !gt.valid()) {
    throw InvalidInput("encode_box_deltas: invalid box");
  }
  const Point2 ac = anchor.center();
  const Point2 gc = gt.center();
  return {(gc.x - ac.x) / anchor.width(), (gc.y - ac.y) / anchor.height(),
          std::log(gt.width() / anchor.width()), std::log(gt.height() / anchor.height())};
}

AxisAlignedBox apply_box_deltas(const AxisAlignedBox& anchor, const BoxDeltas& d) {
  if (!anchor.valid()) throw InvalidInput("apply_box_deltas: invalid anchor");
  for (double v : d) {
    if (!std::isfinite(v)) throw NumericError("apply_box_deltas: non-finite delta");
  }
  const Point2 ac = anchor.center();
  const double w = anchor.width() * std::exp(d[2]);
  const double h = anchor.height() * std::exp(d[3]);
  const double cx = ac.x + d[0] * anchor.width();
  const double cy = ac.y + d[1] * anchor.height();
  AxisAlignedBox out{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
  if (!std::isfinite(w) || !std::isfinite(h) || !out.valid()) {
    throw NumericError("apply_box_deltas: deltas produce a non-finite or empty box");
  }
  return out;
}

double smooth_l1(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1_grad(double x) {
  if (x <= -1.0) return -1.0;
  if (x >= 1.0) return 1.0;
  return x;
}

std::vector<Assignment> assign_stage1_targets(std::span<const AxisAlignedBox> proposals,
                                              std::span<const GroundTruthInstance> gts,
                                              const AngleBinning& binning) {
  std::vector<Assignment> out;
  out.reserve(proposals.size());
  for (const AxisAlignedBox& prop : proposals) {
    Assignment a;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double v = iou_aabb(prop, gts[g].aabb);
      if (v > a.max_iou) {
        a.max_iou = v;
        a.gt_index = static_cast<int>(g);
      }
    }
    if (a.max_iou >= kForegroundIou) {
      const GroundTruthInstance& gt = gts[a.gt_index];
      if (gt.cls == ClassLabel::kBackground) {
        throw InvalidInput("ground truth instance labelled background");
      }
      Stage1Target t;
      t.cls = gt.cls;
      t.deltas = encode_box_deltas(prop, gt.aabb);
      t.orient = encode_orientation(gt.angle, binning);
      t.delta_ind = true;
      a.kind = AssignmentKind::kForeground;
      a.target = t;
    } else if (a.max_iou >= kBackgroundIou) {
      a.kind = AssignmentKind::kBackground;
      a.target = Stage1Target{};
    }
    out.push_back(a);
  }
  return out;
}

bool is_axis_aligned_orientation(double theta_deg) {
  const double t = normalize_angle(theta_deg);
  return t < kAxisTolDeg || t > 180.0 - kAxisTolDeg || std::abs(t - 90.0) < kAxisTolDeg;
}

std::vector<std::optional<Stage2Target>> assign_stage2_targets(
    std::span<const AxisAlignedBox> rp2, std::span<const double> thetas,
    std::span<const GroundTruthInstance> gts) {
  if (rp2.size() != thetas.size()) {
    throw InvalidInput("assign_stage2_targets: one angle per proposal required");
  }
  std::vector<std::optional<Stage2Target>> out;
  out.reserve(rp2.size());
  for (std::size_t i = 0; i < rp2.size(); ++i) {
    double best = 0.0;
    int best_g = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double v = iou_aabb(rp2[i], gts[g].aabb);
      if (v > best) {
        best = v;
        best_g = static_cast<int>(g);
      }
    }
    if (best < kBackgroundIou) {
      out.emplace_back(std::nullopt);
      continue;
    }
    Stage2Target t;
    t.theta_ind = is_axis_aligned_orientation(thetas[i]);
    if (best >= kForegroundIou) {
      t.cls = gts[best_g].cls;
      t.deltas = encode_box_deltas(rp2[i], gts[best_g].aabb);
    }
    out.emplace_back(t);
  }
  return out;
}

double batch_reduce(double sum, std::size_t batch_size) {
  return batch_size == 0 ? 0.0 : sum / static_cast<double>(batch_size);
}

Stage1Loss stage1_loss_unchecked(std::span<const Stage1Prediction> preds,
                                 std::span<const Stage1Target> targets,
                                 const LossWeights& w) {
  check_stage1_shapes(preds, targets);
  double cls = 0.0;
  double orient = 0.0;
  double box = 0.0;
  double offset = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Stage1Prediction& p = preds[i];
    const Stage1Target& t = targets[i];
    cls += neg_log(p.cls_probs[class_of(t.cls)]);
    if (!t.delta_ind) continue;
    orient += neg_log(p.orient_probs[t.orient.bin]);
    for (int j = 0; j < 4; ++j) box += smooth_l1(p.deltas[j] - t.deltas[j]);
    offset += smooth_l1(p.orient_offsets[t.orient.bin] - t.orient.offset);
  }
  const std::size_t n = preds.size();
  Stage1Loss out;
  out.cls = batch_reduce(cls, n);
  out.orient = batch_reduce(orient, n);
  out.box = batch_reduce(box, n);
  out.offset = batch_reduce(offset, n);
  out.total = w.alpha * out.cls + w.beta * out.orient + w.gamma * out.box +
              w.eta * out.offset;
  return out;
}

Stage1Loss stage1_loss(std::span<const Stage1Prediction> preds,
                       std::span<const Stage1Target> targets, const LossWeights& w) {
  if (w.alpha < 0 || w.beta < 0 || w.gamma < 0 || w.eta < 0) {
    throw InvalidInput("stage1_loss: loss weights must be non-negative");
  }
  check_stage1_shapes(preds, targets);
  for (const Stage1Prediction& p : preds) {
    check_probabilities(p.cls_probs, "stage1_loss class head");
    check_probabilities(p.orient_probs, "stage1_loss orientation head");
  }
  return stage1_loss_unchecked(preds, targets, w);
}

std::vector<Stage1Prediction> stage1_loss_gradient(std::span<const Stage1Prediction> preds,
                                                   std::span<const Stage1Target> targets,
                                                   const LossWeights& w) {
  check_stage1_shapes(preds, targets);
  const double inv_n = batch_reduce(1.0, preds.size());
  std::vector<Stage1Prediction> grads;
  grads.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Stage1Prediction& p = preds[i];
    const Stage1Target& t = targets[i];
    Stage1Prediction g;
    g.orient_probs.assign(p.orient_probs.size(), 0.0);
    g.orient_offsets.assign(p.orient_offsets.size(), 0.0);
    const int c = class_of(t.cls);
    g.cls_probs[c] = -w.alpha * inv_n / p.cls_probs[c];
    if (t.delta_ind) {
      const int b = t.orient.bin;
      g.orient_probs[b] = -w.beta * inv_n / p.orient_probs[b];
      for (int j = 0; j < 4; ++j) {
        g.deltas[j] = w.gamma * inv_n * smooth_l1_grad(p.deltas[j] - t.deltas[j]);
      }
      g.orient_offsets[b] =
          w.eta * inv_n * smooth_l1_grad(p.orient_offsets[b] - t.orient.offset);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

Stage2Loss stage2_loss_unchecked(std::span<const Stage2Prediction> preds,
                                 std::span<const Stage2Target> targets) {
  check_stage2_shapes(preds, targets);
  double cls = 0.0;
  double box = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    cls += neg_log(preds[i].cls_probs[class_of(targets[i].cls)]);
    if (!targets[i].theta_ind) continue;
    for (int j = 0; j < 4; ++j) box += smooth_l1(preds[i].deltas[j] - targets[i].deltas[j]);
  }
  Stage2Loss out;
  out.cls = batch_reduce(cls, preds.size());
  out.box = batch_reduce(box, preds.size());
  out.total = out.cls + out.box;
  return out;
}

Stage2Loss stage2_loss(std::span<const Stage2Prediction> preds,
                       std::span<const Stage2Target> targets) {
  check_stage2_shapes(preds, targets);
  for (const Stage2Prediction& p : preds) {
    check_probabilities(p.cls_probs, "stage2_loss class head");
  }
  return stage2_loss_unchecked(preds, targets);
}

std::vector<Stage2Prediction> stage2_loss_gradient(std::span<const Stage2Prediction> preds,
                                                   std::span<const Stage2Target> targets) {
  check_stage2_shapes(preds, targets);
  const double inv_n = batch_reduce(1.0, preds.size());
  std::vector<Stage2Prediction> grads(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int c = class_of(targets[i].cls);
    grads[i].cls_probs[c] = -inv_n / preds[i].cls_probs[c];
    if (!targets[i].theta_ind) continue;
    for (int j = 0; j < 4; ++j) {
      grads[i].deltas[j] = inv_n * smooth_l1_grad(preds[i].deltas[j] - targets[i].deltas[j]);
    }
  }
  return grads;
}

std::vector<double> flatten(std::span<const Stage1Prediction> preds) {
  std::vector<double> flat;
  for (const Stage1Prediction& p : preds) {
    flat.insert(flat.end(), p.cls_probs.begin(), p.cls_probs.end());
    flat.insert(flat.end(), p.deltas.begin(), p.deltas.end());
    flat.insert(flat.end(), p.orient_probs.begin(), p.orient_probs.end());
    flat.insert(flat.end(), p.orient_offsets.begin(), p.orient_offsets.end());
  }
  return flat;
}

std::vector<Stage1Prediction> unflatten_stage1(std::span<const double> flat,
                                               std::size_t batch, int num_bins) {
  const std::size_t stride = kNumClasses + 4 + 2 * static_cast<std::size_t>(num_bins);
  if (num_bins < 2 || flat.size() != batch * stride) {
    throw InvalidInput("unflatten_stage1: size does not match batch layout");
  }
  std::vector<Stage1Prediction> preds(batch);
  auto it = flat.begin();
  for (Stage1Prediction& p : preds) {
    std::copy_n(it, kNumClasses, p.cls_probs.begin());
    it += kNumClasses;
    std::copy_n(it, 4, p.deltas.begin());
    it += 4;
    p.orient_probs.assign(it, it + num_bins);
    it += num_bins;
    p.orient_offsets.assign(it, it + num_bins);
    it += num_bins;
  }
  return preds;
}

std::vector<double> flatten(std::span<const Stage2Prediction> preds) {
  std::vector<double> flat;
  for (const Stage2Prediction& p : preds) {
    flat.insert(flat.end(), p.cls_probs.begin(), p.cls_probs.end());
    flat.insert(flat.end(), p.deltas.begin(), p.deltas.end());
  }
  return flat;
}

std::vector<Stage2Prediction> unflatten_stage2(std::span<const double> flat,
                                               std::size_t batch) {
  constexpr std::size_t kStride = kNumClasses + 4;
  if (flat.size() != batch * kStride) {
    throw InvalidInput("unflatten_stage2: size does not match batch layout");
  }
  std::vector<Stage2Prediction> preds(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    std::copy_n(flat.begin() + i * kStride, kNumClasses, preds[i].cls_probs.begin());
    std::copy_n(flat.begin() + i * kStride + kNumClasses, 4, preds[i].deltas.begin());
  }
  return preds;
}

double gradient_check(const ScalarFn& loss, const GradientFn& grad,
                      std::span<const double> point, double epsilon, double floor) {
  if (!(epsilon > 0)) throw InvalidInput("gradient_check: epsilon must be positive");
  const std::vector<double> analytic = grad(point);
  if (analytic.size() != point.size()) {
    throw InvalidInput("gradient_check: gradient has the wrong dimension");
  }
  std::vector<double> x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + epsilon;
    const double up = loss(x);
    x[i] = saved - epsilon;
    const double down = loss(x);
    x[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(analytic[i])) {
      throw NumericError("gradient_check: non-finite evaluation at coordinate " +
                         std::to_string(i));
    }
    const double numeric = (up - down) / (2 * epsilon);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace obbkit
