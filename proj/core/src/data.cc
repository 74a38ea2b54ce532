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

#include "obbkit/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "nlohmann/json.hpp"
#include "obbkit/error.h"
#include "obbkit/orientation.h"

namespace obbkit {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Serialization helpers.

ordered_json corners_json(const OrientedBox& box) {
  ordered_json arr = ordered_json::array();
  for (const Point2& p : obb_corners(box)) {
    arr.push_back(p.x);
    arr.push_back(p.y);
  }
  return arr;
}

ordered_json aabb_json(const AxisAlignedBox& b) {
  return ordered_json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

std::vector<double> numbers(const json& j, const char* field, std::size_t n) {
  if (!j.is_array() || j.size() != n) {
    throw std::runtime_error(std::string("field '") + field + "' must be an array of " +
                             std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const json& v : j) {
    if (!v.is_number()) {
      throw std::runtime_error(std::string("field '") + field + "' must hold numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

OrientedBox corners_to_obb(const std::vector<double>& v) {
  Quad q;
  for (std::size_t k = 0; k < 4; ++k) q[k] = {v[2 * k], v[2 * k + 1]};
  return obb_from_corners(q);
}

ClassLabel object_class(const json& j) {
  const std::string name = j.at("cls").get<std::string>();
  const auto cls = parse_class_label(name);
  if (!cls || *cls == ClassLabel::kBackground) {
    throw std::runtime_error("unknown object class '" + name + "'");
  }
  return *cls;
}

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    try {
      fn(j, line_no);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic random numbers. The engine is fully specified by the
// standard; the distribution is written out so output does not depend on
// the standard library's distribution implementations.

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t salt) : engine_(splitmix64(seed ^ splitmix64(salt))) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

bool boxes_touch(const AxisAlignedBox& a, const AxisAlignedBox& b, double gap) {
  return a.x_min < b.x_max + gap && b.x_min < a.x_max + gap && a.y_min < b.y_max + gap &&
         b.y_min < a.y_max + gap;
}

AxisAlignedBox shift_aabb(const AxisAlignedBox& b, double dx) {
  return {b.x_min + dx, b.y_min, b.x_max + dx, b.y_max};
}

OrientedBox shift_along_axis(const OrientedBox& b, double d) {
  const auto [s, c] = sincos_deg(b.theta);
  OrientedBox out = b;
  out.cx += d * c;
  out.cy += d * s;
  return out;
}

// Shift of a box of length `len` along its own axis giving IoU q:
// (len - d) / (len + d) = q.
double shift_for_iou(double len, double q) {
  if (q >= 1.0) return 0.0;
  return len * (1.0 - q) / (1.0 + q);
}

void paint_bar(FeatureGrid& fm, const OrientedBox& bar, int channel, float gain) {
  const AxisAlignedBox ext = enclosing_aabb(bar);
  const int x0 = std::max(0, static_cast<int>(std::floor(ext.x_min)) - 2);
  const int y0 = std::max(0, static_cast<int>(std::floor(ext.y_min)) - 2);
  const int x1 = std::min(fm.width() - 1, static_cast<int>(std::ceil(ext.x_max)) + 2);
  const int y1 = std::min(fm.height() - 1, static_cast<int>(std::ceil(ext.y_max)) + 2);
  const auto [s, c] = sincos_deg(bar.theta);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - bar.cx;
      const double dy = y - bar.cy;
      const double l = dx * c + dy * s;
      const double t = -dx * s + dy * c;
      const double lateral = std::exp(-2.0 * (t / bar.half_wid) * (t / bar.half_wid));
      const double over = std::max(0.0, std::abs(l) - bar.half_len);
      const double longitudinal = std::exp(-over * over);
      const float v = gain * static_cast<float>(lateral * longitudinal);
      fm.at(y, x, channel) = std::max(fm.at(y, x, channel), v);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

AnnotationSet parse_annotations(std::istream& in) {
  AnnotationSet set;
  std::set<std::string> seen;
  for_each_record(in, [&](const json& j, int line_no) {
    SceneAnnotation scene;
    scene.image_id = j.at("image_id").get<std::string>();
    const std::string& id = scene.image_id;
    auto fail = [&](const std::string& what) {
      throw ParseError("image '" + id + "': " + what, line_no);
    };
    if (id.empty()) fail("empty image_id");
    if (!seen.insert(id).second) fail("duplicate image_id");
    scene.width = j.at("width").get<int>();
    scene.height = j.at("height").get<int>();
    if (scene.width <= 0 || scene.height <= 0) fail("image size must be positive");
    for (const json& ji : j.at("instances")) {
      GroundTruthInstance gt;
      gt.cls = object_class(ji);
      const auto b = numbers(ji.at("aabb"), "aabb", 4);
      gt.aabb = {b[0], b[1], b[2], b[3]};
      if (!gt.aabb.valid()) fail("aabb must satisfy x_min < x_max and y_min < y_max");
      const AxisAlignedBox clamped{std::clamp(gt.aabb.x_min, 0.0, double(scene.width)),
                                   std::clamp(gt.aabb.y_min, 0.0, double(scene.height)),
                                   std::clamp(gt.aabb.x_max, 0.0, double(scene.width)),
                                   std::clamp(gt.aabb.y_max, 0.0, double(scene.height))};
      if (!(clamped == gt.aabb)) {
        if (!clamped.valid()) fail("aabb lies outside the image");
        gt.aabb = clamped;
        ++set.clamped_boxes;
      }
      const double angle = ji.at("angle_deg").get<double>();
      if (!std::isfinite(angle)) fail("non-finite angle_deg");
      gt.angle = normalize_angle(angle);
      if (ji.contains("obb_ann") && !ji.at("obb_ann").is_null()) {
        try {
          gt.obb_ann = corners_to_obb(numbers(ji.at("obb_ann"), "obb_ann", 8));
        } catch (const InvalidInput& e) {
          fail(std::string("obb_ann: ") + e.what());
        }
      }
      scene.instances.push_back(gt);
    }
    set.scenes.push_back(std::move(scene));
  });
  return set;
}

AnnotationSet load_annotations(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_annotations(in);
}

void write_annotations(std::ostream& out, std::span<const SceneAnnotation> scenes) {
  for (const SceneAnnotation& s : scenes) {
    ordered_json j;
    j["image_id"] = s.image_id;
    j["width"] = s.width;
    j["height"] = s.height;
    ordered_json inst = ordered_json::array();
    for (const GroundTruthInstance& g : s.instances) {
      ordered_json ji;
      ji["cls"] = std::string(to_string(g.cls));
      ji["aabb"] = aabb_json(g.aabb);
      ji["angle_deg"] = g.angle;
      if (g.obb_ann) ji["obb_ann"] = corners_json(*g.obb_ann);
      inst.push_back(std::move(ji));
    }
    j["instances"] = std::move(inst);
    out << j.dump() << '\n';
  }
}

void save_annotations(const std::filesystem::path& path,
                      std::span<const SceneAnnotation> scenes) {
  std::ofstream out = open_output(path);
  write_annotations(out, scenes);
}

std::vector<DetectionRecord> parse_detections(std::istream& in) {
  std::vector<DetectionRecord> out;
  for_each_record(in, [&](const json& j, int) {
    DetectionRecord r;
    r.image_id = j.at("image_id").get<std::string>();
    r.det.cls = object_class(j);
    r.det.score = j.at("score").get<double>();
    const std::string kind_name = j.at("kind").get<std::string>();
    const auto kind = parse_box_kind(kind_name);
    if (!kind) throw std::runtime_error("unknown box kind '" + kind_name + "'");
    if (*kind == BoxKind::kAxis) {
      const auto b = numbers(j.at("box"), "box", 4);
      r.det.box = AxisAlignedBox{b[0], b[1], b[2], b[3]};
    } else {
      r.det.box = corners_to_obb(numbers(j.at("box"), "box", 8));
    }
    try {
      validate(r.det);
    } catch (const InvalidInput& e) {
      throw std::runtime_error("image '" + r.image_id + "': " + e.what());
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<DetectionRecord> load_detections(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_detections(in);
}

void write_detections(std::ostream& out, std::span<const DetectionRecord> dets) {
  for (const DetectionRecord& r : dets) {
    ordered_json j;
    j["image_id"] = r.image_id;
    j["cls"] = std::string(to_string(r.det.cls));
    j["score"] = r.det.score;
    j["kind"] = std::string(to_string(r.det.kind()));
    if (const auto* a = std::get_if<AxisAlignedBox>(&r.det.box)) {
      j["box"] = aabb_json(*a);
    } else {
      j["box"] = corners_json(std::get<OrientedBox>(r.det.box));
    }
    out << j.dump() << '\n';
  }
}

void save_detections(const std::filesystem::path& path,
                     std::span<const DetectionRecord> dets) {
  std::ofstream out = open_output(path);
  write_detections(out, dets);
}

std::vector<ImageRecord> join_dataset(std::span<const SceneAnnotation> scenes,
                                      std::span<const DetectionRecord> dets, BoxKind kind) {
  std::vector<ImageRecord> records;
  std::map<std::string, std::size_t> index;
  for (const SceneAnnotation& s : scenes) {
    index.emplace(s.image_id, records.size());
    records.push_back({s.image_id, s.instances, {}});
  }
  for (const DetectionRecord& d : dets) {
    const auto it = index.find(d.image_id);
    if (it == index.end()) {
      throw InvalidInput("detection for unknown image '" + d.image_id + "'");
    }
    if (d.det.kind() == kind) records[it->second].dets.push_back(d.det);
  }
  return records;
}

OrientedBox obb_rot(const GroundTruthInstance& gt) {
  return rotate_aabb(gt.aabb, gt.angle);
}

CorruptionModel CorruptionModel::from_noise(double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw InvalidInput("noise must lie in [0, 1]");
  return {noise / 2, noise / 2, 1.0 - 0.6 * noise, 1.0, noise / 2};
}

SyntheticScene generate_synthetic_scene(std::uint64_t seed, const SyntheticParams& params) {
  if (params.n_instances < 0 || params.size < 16 || params.channels < 1 ||
      params.max_attempts < 1) {
    throw InvalidInput("invalid synthetic scene parameters");
  }
  const CorruptionModel cm =
      params.corruption ? *params.corruption : CorruptionModel::from_noise(params.noise);
  if (!(cm.miss_rate >= 0 && cm.miss_rate <= 1 && cm.fp_rate >= 0 && cm.fp_rate <= 1 &&
        cm.min_iou > 0 && cm.min_iou <= cm.max_iou && cm.max_iou <= 1 &&
        cm.score_spread >= 0 && cm.score_spread <= 1)) {
    throw InvalidInput("invalid corruption model");
  }

  // Independent streams keep placement fixed when corruption settings change.
  Stream place(seed, 1);
  Stream corrupt(seed, 2);
  Stream clutter(seed, 3);

  const double size = params.size;
  SyntheticScene scene{FeatureGrid(params.size, params.size, params.channels), {}, {}};
  SceneAnnotation& ann = scene.annotations;
  ann.image_id = params.image_id.empty() ? "scene_" + std::to_string(seed) : params.image_id;
  ann.width = params.size;
  ann.height = params.size;

  for (int i = 0; i < params.n_instances; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < params.max_attempts && !placed; ++attempt) {
      const ClassLabel cls = place.uniform() < 0.5 ? ClassLabel::kGun : ClassLabel::kRifle;
      const double len = size * (cls == ClassLabel::kGun ? place.uniform(0.12, 0.22)
                                                         : place.uniform(0.25, 0.40));
      const double wid = len * place.uniform(0.2, 0.35);
      const double theta = place.uniform(0.0, 180.0);
      const double ux = place.uniform();
      const double uy = place.uniform();
      OrientedBox obb{0.0, 0.0, len / 2, wid / 2, theta};
      const AxisAlignedBox ext = enclosing_aabb(obb);
      const double ex = ext.width() / 2;
      const double ey = ext.height() / 2;
      if (2 * ex + 2 > size || 2 * ey + 2 > size) continue;
      obb.cx = 1 + ex + ux * (size - 2 - 2 * ex);
      obb.cy = 1 + ey + uy * (size - 2 - 2 * ey);
      const AxisAlignedBox aabb = enclosing_aabb(obb);
      const bool overlaps = std::any_of(
          ann.instances.begin(), ann.instances.end(),
          [&](const GroundTruthInstance& g) { return boxes_touch(g.aabb, aabb, 1.0); });
      if (overlaps) continue;
      ann.instances.push_back({cls, aabb, theta, obb});
      placed = true;
    }
    if (!placed) {
      throw InvalidInput("could not place instance " + std::to_string(i) + " of scene '" +
                         ann.image_id + "' without overlap");
    }
  }

  // Clutter first, then bars on top.
  for (float& v : scene.features.values()) v = static_cast<float>(0.05 * clutter.uniform());
  for (const GroundTruthInstance& g : ann.instances) {
    const int ch = (class_index(g.cls) - 1) % params.channels;
    paint_bar(scene.features, *g.obb_ann, ch, 1.0f);
    if (params.channels > 2) {
      paint_bar(scene.features, *g.obb_ann, 2, static_cast<float>(0.25 + g.angle / 240.0));
    }
  }

  for (const GroundTruthInstance& g : ann.instances) {
    const double miss = corrupt.uniform();
    const double q = cm.min_iou + (cm.max_iou - cm.min_iou) * corrupt.uniform();
    const double sign = corrupt.uniform() < 0.5 ? -1.0 : 1.0;
    const double score = 1.0 - cm.score_spread * corrupt.uniform();
    if (miss < cm.miss_rate) continue;
    const OrientedBox& obb = *g.obb_ann;
    scene.oracle_detections.push_back(
        {g.cls, score, shift_aabb(g.aabb, sign * shift_for_iou(g.aabb.width(), q))});
    scene.oracle_detections.push_back(
        {g.cls, score, shift_along_axis(obb, sign * shift_for_iou(2 * obb.half_len, q))});
  }

  for (int j = 0; j < params.n_instances; ++j) {
    const double keep = corrupt.uniform();
    const ClassLabel cls = corrupt.uniform() < 0.5 ? ClassLabel::kGun : ClassLabel::kRifle;
    const double len = size * corrupt.uniform(0.1, 0.3);
    OrientedBox fp{corrupt.uniform(0.0, size), corrupt.uniform(0.0, size), len / 2,
                   len * corrupt.uniform(0.1, 0.2), corrupt.uniform(0.0, 180.0)};
    const double score = corrupt.uniform(0.01, 0.99);
    if (keep >= cm.fp_rate) continue;
    scene.oracle_detections.push_back({cls, score, enclosing_aabb(fp)});
    scene.oracle_detections.push_back({cls, score, fp});
  }
  return scene;
}

}  // namespace obbkit
