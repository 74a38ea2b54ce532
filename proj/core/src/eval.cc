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

#include "obbkit/eval.h"

#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

#include "obbkit/data.h"
#include "obbkit/error.h"

namespace obbkit {
namespace {

std::vector<std::size_t> score_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  return order;
}

void check_thresholds(std::span<const double> thresholds) {
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("IoU threshold outside (0, 1]");
  }
}

// flags[image][threshold][detection]
using ImageFlags = std::vector<std::vector<bool>>;

ImageFlags match_image(const ImageRecord& rec, std::span<const double> thresholds,
                       const EvalOptions& options) {
  ImageFlags out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    out.push_back(match_detections(rec.dets, rec.gts, t, options.kind, options.gt_source,
                                   rec.image_id));
  }
  return out;
}

std::vector<ImageFlags> match_all(std::span<const ImageRecord> dataset,
                                  std::span<const double> thresholds,
                                  const EvalOptions& options) {
  std::vector<ImageFlags> flags(dataset.size());
  const std::size_t workers = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(options.num_threads, 1)), 1,
      std::max<std::size_t>(dataset.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      flags[i] = match_image(dataset[i], thresholds, options);
    }
    return flags;
  }
  struct Failure {
    std::size_t image = 0;
    std::exception_ptr error;
  };
  std::vector<Failure> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < dataset.size(); i += workers) {
          try {
            flags[i] = match_image(dataset[i], thresholds, options);
          } catch (...) {
            failures[w] = {i, std::current_exception()};
            return;
          }
        }
      });
    }
  }
  // Surface the error a sequential run would have hit first.
  const Failure* first = nullptr;
  for (const Failure& f : failures) {
    if (f.error && (!first || f.image < first->image)) first = &f;
  }
  if (first) std::rethrow_exception(first->error);
  return flags;
}

}  // namespace

AnyBox ground_truth_box(const GroundTruthInstance& gt, BoxKind kind, GtSource source,
                        const std::string& image_id) {
  if (kind == BoxKind::kAxis) return gt.aabb;
  switch (source) {
    case GtSource::kRotatedOnly:
      return obb_rot(gt);
    case GtSource::kAnnotatedOnly:
      if (!gt.obb_ann) {
        throw InvalidInput("image '" + image_id +
                           "': oriented evaluation requires an annotated OBB");
      }
      return *gt.obb_ann;
    case GtSource::kAnnotatedElseRotated:
      break;
  }
  return gt.obb_ann ? AnyBox(*gt.obb_ann) : AnyBox(obb_rot(gt));
}

std::vector<bool> match_detections(std::span<const Detection> dets,
                                   std::span<const GroundTruthInstance> gts,
                                   double iou_thresh, BoxKind kind, GtSource source,
                                   const std::string& image_id) {
  std::vector<AnyBox> gt_boxes;
  gt_boxes.reserve(gts.size());
  for (const GroundTruthInstance& g : gts) {
    gt_boxes.push_back(ground_truth_box(g, kind, source, image_id));
  }
  for (const Detection& d : dets) {
    validate(d);
    if (d.kind() != kind) {
      throw InvalidInput("image '" + image_id + "': detection box kind does not match " +
                         std::string(to_string(kind)) + " evaluation");
    }
  }
  std::vector<bool> tp(dets.size(), false);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t i : score_order(dets)) {
    double best = -1.0;
    int best_g = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].cls != dets[i].cls) continue;
      const double v = iou(dets[i].box, gt_boxes[g]);
      if (v > best) {
        best = v;
        best_g = static_cast<int>(g);
      }
    }
    if (best_g >= 0 && best >= iou_thresh) {
      tp[i] = true;
      taken[best_g] = true;
    }
  }
  return tp;
}

std::optional<double> average_precision(std::span<const ScoredFlag> flags, int n_gt) {
  if (n_gt <= 0) return std::nullopt;
  std::vector<std::size_t> order(flags.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return flags[a].score > flags[b].score;
  });
  const std::size_t n = order.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  int tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (flags[order[k]].tp) ++tp;
    recall[k] = static_cast<double>(tp) / n_gt;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  // Precision envelope: best precision at any recall >= this one.
  for (std::size_t k = n; k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (recall[k] != prev_recall) {
      ap += (recall[k] - prev_recall) * precision[k];
      prev_recall = recall[k];
    }
  }
  return ap;
}

const ClassApEntry& EvalResult::entry(ClassLabel cls, std::size_t threshold_index) const {
  for (std::size_t c = 0; c < kObjectClasses.size(); ++c) {
    if (kObjectClasses[c] == cls) {
      return entries.at(threshold_index * kObjectClasses.size() + c);
    }
  }
  throw InvalidInput("EvalResult has no entry for class " + std::string(to_string(cls)));
}

EvalResult evaluate_detections(std::span<const ImageRecord> dataset,
                               std::span<const double> thresholds,
                               const EvalOptions& options) {
  check_thresholds(thresholds);
  const std::vector<ImageFlags> flags = match_all(dataset, thresholds, options);

  EvalResult result;
  result.thresholds.assign(thresholds.begin(), thresholds.end());
  for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
    double ap_sum = 0.0;
    int ap_count = 0;
    for (ClassLabel cls : kObjectClasses) {
      ClassApEntry e;
      e.cls = cls;
      e.iou_thresh = thresholds[ti];
      std::vector<ScoredFlag> scored;
      for (std::size_t img = 0; img < dataset.size(); ++img) {
        for (const GroundTruthInstance& g : dataset[img].gts) {
          if (g.cls == cls) ++e.n_gt;
        }
        const std::vector<Detection>& dets = dataset[img].dets;
        for (std::size_t d = 0; d < dets.size(); ++d) {
          if (dets[d].cls != cls) continue;
          const bool tp = flags[img][ti][d];
          scored.push_back({dets[d].score, tp});
          tp ? ++e.tp : ++e.fp;
        }
      }
      e.fn = e.n_gt - e.tp;
      e.ap = average_precision(scored, e.n_gt);
      if (e.ap) {
        ap_sum += *e.ap;
        ++ap_count;
      }
      result.entries.push_back(e);
    }
    result.map.push_back(ap_count > 0 ? std::optional<double>(ap_sum / ap_count)
                                      : std::nullopt);
  }
  return result;
}

std::vector<SweepPoint> confidence_sweep(std::span<const ImageRecord> dataset,
                                         std::span<const double> levels,
                                         const EvalOptions& options) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0 && levels[i] < 1.0)) {
      throw InvalidInput("confidence level outside (0, 1)");
    }
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw InvalidInput("confidence levels must be strictly increasing");
    }
  }
  const std::array<double, 1> iou{kSweepIou};
  std::vector<SweepPoint> out;
  for (double level : levels) {
    std::vector<ImageRecord> filtered;
    filtered.reserve(dataset.size());
    SweepPoint pt;
    pt.level = level;
    for (const ImageRecord& rec : dataset) {
      ImageRecord f{rec.image_id, rec.gts, {}};
      for (const Detection& d : rec.dets) {
        if (d.score >= level) f.dets.push_back(d);
      }
      pt.kept += f.dets.size();
      filtered.push_back(std::move(f));
    }
    pt.result = evaluate_detections(filtered, iou, options);
    pt.map = pt.result.map.front();
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace obbkit
