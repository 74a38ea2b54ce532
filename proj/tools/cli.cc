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

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11/CLI11.hpp"
#include "nlohmann/json.hpp"
#include "obbkit/data.h"
#include "obbkit/error.h"
#include "obbkit/eval.h"
#include "obbkit/geometry.h"
#include "obbkit/nms.h"
#include "obbkit/opg.h"
#include "obbkit/pooling.h"

namespace obbkit::cli {
namespace {

using nlohmann::ordered_json;

int env_threads() {
  const char* v = std::getenv("OBBKIT_THREADS");
  if (v == nullptr) return 1;
  const int n = std::atoi(v);
  return std::clamp(n, 1, 256);
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::exception();
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "cannot parse number '" + item + "'");
    }
  }
  return out;
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "n/a"; }

ordered_json opt_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

// Writes JSONL lines to stdout (--format jsonl) and/or a file (--out).
struct JsonSink {
  bool to_stdout = false;
  std::string path;
  std::vector<std::string> lines;

  void add(const ordered_json& j) { lines.push_back(j.dump()); }

  void flush(std::ostream& out, CommandOutcome& outcome) const {
    if (to_stdout) {
      for (const std::string& l : lines) out << l << '\n';
    }
    if (!path.empty()) {
      std::ofstream f(path);
      if (!f) throw std::runtime_error("cannot write '" + path + "'");
      for (const std::string& l : lines) f << l << '\n';
      outcome.artifacts.emplace_back(path);
    }
  }
};

struct DatasetArgs {
  std::string gts;
  std::string dets;
  std::string kind = "axis";
  std::string gt_source = "annotated";
};

void add_dataset_options(CLI::App* cmd, DatasetArgs& a) {
  cmd->add_option("--gts", a.gts, "Annotation file (JSONL)")->required();
  cmd->add_option("--dets", a.dets, "Detection file (JSONL)")->required();
  cmd->add_option("--kind", a.kind, "Box kind to evaluate")
      ->check(CLI::IsMember({"axis", "oriented"}));
  cmd->add_option("--gt-source", a.gt_source,
                  "Oriented ground truth: annotated (fallback rotated), rotated, "
                  "annotated-only")
      ->check(CLI::IsMember({"annotated", "rotated", "annotated-only"}));
}

EvalOptions eval_options(const DatasetArgs& a) {
  EvalOptions o;
  o.kind = *parse_box_kind(a.kind);
  o.gt_source = a.gt_source == "rotated"          ? GtSource::kRotatedOnly
                : a.gt_source == "annotated-only" ? GtSource::kAnnotatedOnly
                                                  : GtSource::kAnnotatedElseRotated;
  o.num_threads = env_threads();
  return o;
}

std::vector<ImageRecord> load_dataset(const DatasetArgs& a) {
  const AnnotationSet ann = load_annotations(a.gts);
  const std::vector<DetectionRecord> dets = load_detections(a.dets);
  return join_dataset(ann.scenes, dets, *parse_box_kind(a.kind));
}

void print_eval_table(std::ostream& out, const EvalResult& r, const DatasetArgs& a,
                      std::size_t images) {
  out << "kind " << a.kind << "  images " << images << "\n";
  out << std::left << std::setw(8) << "IoU" << std::setw(9) << "AP_gun" << std::setw(10)
      << "AP_rifle" << std::setw(8) << "mAP" << std::setw(7) << "TP" << std::setw(7)
      << "FP" << "FN\n";
  for (std::size_t t = 0; t < r.thresholds.size(); ++t) {
    const ClassApEntry& g = r.entry(ClassLabel::kGun, t);
    const ClassApEntry& f = r.entry(ClassLabel::kRifle, t);
    out << std::left << std::setw(8) << fmt(r.thresholds[t], 2) << std::setw(9) << fmt(g.ap)
        << std::setw(10) << fmt(f.ap) << std::setw(8) << fmt(r.map[t]) << std::setw(7)
        << g.tp + f.tp << std::setw(7) << g.fp + f.fp << g.fn + f.fn << "\n";
  }
}

ordered_json eval_json(const EvalResult& r, std::size_t t, const std::string& kind) {
  ordered_json j;
  j["kind"] = kind;
  j["iou"] = r.thresholds[t];
  ordered_json ap;
  ordered_json counts;
  for (ClassLabel c : kObjectClasses) {
    const ClassApEntry& e = r.entry(c, t);
    ap[std::string(to_string(c))] = opt_json(e.ap);
    counts[std::string(to_string(c))] = {
        {"n_gt", e.n_gt}, {"tp", e.tp}, {"fp", e.fp}, {"fn", e.fn}};
  }
  j["ap"] = ap;
  j["map"] = opt_json(r.map[t]);
  j["counts"] = counts;
  return j;
}

std::vector<double> parse_box(const std::string& text) {
  const std::vector<double> v = parse_number_list(text, "--box");
  if (v.size() != 4) throw CLI::ValidationError("--box", "expected x1,y1,x2,y2");
  return v;
}

// ---------------------------------------------------------------------------

std::uint64_t scene_seed(std::uint64_t seed, int k) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(k);
}

std::string scene_id(int k) {
  std::ostringstream os;
  os << "synth_" << std::setw(4) << std::setfill('0') << k;
  return os.str();
}

std::vector<SyntheticScene> generate_scenes(std::uint64_t seed, int count,
                                            const SyntheticParams& base) {
  std::vector<std::optional<SyntheticScene>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](int k) {
    try {
      SyntheticParams p = base;
      p.image_id = scene_id(k);
      slots[k].emplace(generate_synthetic_scene(scene_seed(seed, k), p));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const int workers = std::min(env_threads(), std::max(count, 1));
  if (workers <= 1) {
    for (int k = 0; k < count; ++k) work(k);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int k = w; k < count; k += workers) work(k);
      });
    }
  }
  std::vector<SyntheticScene> scenes;
  for (int k = 0; k < count; ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    scenes.push_back(std::move(*slots[k]));
  }
  return scenes;
}

template <typename Fn>
double seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

OrientedBox random_obb(std::mt19937_64& rng, double extent) {
  std::uniform_real_distribution<double> pos(0.0, extent);
  std::uniform_real_distribution<double> half(2.0, extent / 8);
  std::uniform_real_distribution<double> ang(0.0, 180.0);
  return OrientedBox{pos(rng), pos(rng), half(rng), half(rng), ang(rng)};
}

}  // namespace

std::vector<double> parse_levels(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return parse_number_list(text, "--levels");
  const std::string lo_text = text.substr(0, dots);
  std::string hi_text = text.substr(dots + 2);
  double step = 0.1;
  if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
    step = parse_number_list(hi_text.substr(colon + 1), "--levels").at(0);
    hi_text = hi_text.substr(0, colon);
  }
  const double lo = parse_number_list(lo_text, "--levels").at(0);
  const double hi = parse_number_list(hi_text, "--levels").at(0);
  if (!(step > 0) || !(hi >= lo)) {
    throw CLI::ValidationError("--levels", "expected lo..hi[:step] with lo <= hi");
  }
  const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(std::round((lo + k * step) * 1e9) / 1e9);
  }
  return out;
}

BenchReport bench_kernel(std::string_view kernel, std::size_t n, std::uint64_t seed) {
  BenchReport report;
  report.kernel = std::string(kernel);
  report.n = n;
  std::mt19937_64 rng(seed);
  volatile double sink = 0.0;
  std::function<void()> body;

  std::vector<OrientedBox> a;
  std::vector<OrientedBox> b;
  std::optional<FeatureGrid> grid;
  std::vector<float> pooled;
  std::vector<Detection> dets;

  if (kernel == "iou_obb") {
    // Clustered so most pairs overlap and exercise the clipper.
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(random_obb(rng, 64));
      OrientedBox other = random_obb(rng, 64);
      other.cx = a.back().cx + (other.cx - 32) / 8;
      other.cy = a.back().cy + (other.cy - 32) / 8;
      b.push_back(other);
    }
    body = [&] {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += iou_obb(a[i], b[i]);
      sink = sink + acc;
    };
  } else if (kernel == "oaroi") {
    constexpr int kSide = 128;
    constexpr int kChannels = 64;
    grid.emplace(kSide, kSide, kChannels);
    std::uniform_real_distribution<float> val(0.0f, 1.0f);
    for (float& v : grid->values()) v = val(rng);
    for (std::size_t i = 0; i < n; ++i) a.push_back(random_obb(rng, kSide));
    pooled.resize(static_cast<std::size_t>(kDefaultPoolSize) * kDefaultPoolSize * kChannels);
    body = [&] {
      for (std::size_t i = 0; i < n; ++i) {
        oaroi_pool_into(*grid, a[i], kDefaultPoolSize, kDefaultPoolSize, pooled);
        sink = sink + pooled[0];
      }
    };
  } else if (kernel == "nms") {
    std::uniform_real_distribution<double> score(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      dets.push_back({i % 2 ? ClassLabel::kGun : ClassLabel::kRifle, score(rng),
                      random_obb(rng, 512)});
    }
    body = [&] { sink = sink + static_cast<double>(nms_indices(dets, 0.5, BoxKind::kOriented).size()); };
  } else {
    throw std::invalid_argument("unknown kernel '" + std::string(kernel) + "'");
  }

  body();  // warm-up
  for (int r = 0; r < kBenchRepetitions; ++r) {
    const double s = seconds(body);
    report.items_per_second.push_back(s > 0 ? static_cast<double>(n) / s : 0.0);
  }
  std::vector<double> sorted = report.items_per_second;
  std::sort(sorted.begin(), sorted.end());
  report.median_items_per_second = sorted[sorted.size() / 2];
  return report;
}

CommandOutcome run(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CommandOutcome outcome;
  CLI::App app{"Oriented detection geometry, pooling and evaluation tools", "obbkit"};
  app.require_subcommand(1);

  std::string format = "text";
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "jsonl"}));
  };

  // orp
  CLI::App* orp_cmd = app.add_subcommand("orp", "Oriented proposal for a box and angle");
  std::string box_text;
  double theta = 0.0;
  orp_cmd->add_option("--box", box_text, "x1,y1,x2,y2")->required();
  orp_cmd->add_option("--theta", theta, "Angle in degrees")->required();
  add_format(orp_cmd);

  // eval
  CLI::App* eval_cmd = app.add_subcommand("eval", "Average precision per class and IoU");
  DatasetArgs eval_args;
  std::string iou_text = "0.4,0.5,0.6";
  std::string eval_out;
  add_dataset_options(eval_cmd, eval_args);
  eval_cmd->add_option("--iou", iou_text, "Comma-separated IoU thresholds");
  eval_cmd->add_option("--out", eval_out, "Also write JSONL results here");
  add_format(eval_cmd);

  // sweep
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "mAP@0.5 across confidence levels");
  DatasetArgs sweep_args;
  std::string levels_text = "0.1..0.9";
  std::string sweep_out;
  add_dataset_options(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--levels", levels_text, "lo..hi[:step] or comma list");
  sweep_cmd->add_option("--out", sweep_out, "Also write JSONL results here");
  add_format(sweep_cmd);

  // synth
  CLI::App* synth_cmd = app.add_subcommand("synth", "Synthetic scenes and oracle detections");
  std::uint64_t seed = 0;
  int scenes = 1;
  std::string out_dir;
  SyntheticParams synth_params;
  synth_cmd->add_option("--seed", seed, "Random seed")->required();
  synth_cmd->add_option("--scenes", scenes, "Number of scenes")->check(CLI::Range(1, 1000000));
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();
  synth_cmd->add_option("--noise", synth_params.noise, "Corruption level in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--instances", synth_params.n_instances, "Objects per scene")
      ->check(CLI::Range(0, 64));
  synth_cmd->add_option("--size", synth_params.size, "Scene side in pixels")
      ->check(CLI::Range(16, 8192));

  // bench
  CLI::App* bench_cmd = app.add_subcommand("bench", "Single-threaded kernel throughput");
  std::string kernel;
  std::size_t bench_n = 0;
  bench_cmd->add_option("--kernel", kernel, "Kernel")
      ->required()
      ->check(CLI::IsMember({"iou_obb", "oaroi", "nms"}));
  bench_cmd->add_option("--n", bench_n, "Items per repetition");
  add_format(bench_cmd);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    outcome.exit_code = code == 0 ? kExitOk : kExitUsage;
    return outcome;
  }

  try {
    if (orp_cmd->parsed()) {
      const std::vector<double> b = parse_box(box_text);
      const AxisAlignedBox rp2{b[0], b[1], b[2], b[3]};
      const OrientedBox inscribed = max_inscribed_rect(rp2, theta);
      const OrientedProposal p = make_orp(rp2, theta);
      const Quad corners = obb_corners(p.orp);
      if (format == "jsonl") {
        ordered_json j;
        j["rp2"] = b;
        j["theta"] = p.theta;
        j["inscribed"] = {{"cx", inscribed.cx},         {"cy", inscribed.cy},
                          {"half_len", inscribed.half_len}, {"half_wid", inscribed.half_wid},
                          {"area", inscribed.area()}};
        j["orp"] = {{"cx", p.orp.cx},         {"cy", p.orp.cy},
                    {"half_len", p.orp.half_len}, {"half_wid", p.orp.half_wid},
                    {"area", p.orp.area()}};
        ordered_json cj = ordered_json::array();
        for (const Point2& c : corners) cj.push_back({c.x, c.y});
        j["corners"] = cj;
        out << j.dump() << '\n';
      } else {
        out << "theta      " << fmt(p.theta, 4) << "\n";
        out << "inscribed  half_len " << fmt(inscribed.half_len, 4) << "  half_wid "
            << fmt(inscribed.half_wid, 4) << "  area " << fmt(inscribed.area(), 4) << "\n";
        out << "orp        center (" << fmt(p.orp.cx, 4) << ", " << fmt(p.orp.cy, 4)
            << ")  half_len " << fmt(p.orp.half_len, 4) << "  half_wid "
            << fmt(p.orp.half_wid, 4) << "  area " << fmt(p.orp.area(), 4) << "\n";
        out << "corners   ";
        for (const Point2& c : corners) out << " (" << fmt(c.x, 4) << ", " << fmt(c.y, 4) << ")";
        out << "\n";
      }
    } else if (eval_cmd->parsed()) {
      const std::vector<double> thresholds = parse_number_list(iou_text, "--iou");
      const std::vector<ImageRecord> data = load_dataset(eval_args);
      const EvalResult r = evaluate_detections(data, thresholds, eval_options(eval_args));
      JsonSink sink{format == "jsonl", eval_out, {}};
      for (std::size_t t = 0; t < r.thresholds.size(); ++t) {
        sink.add(eval_json(r, t, eval_args.kind));
      }
      if (format != "jsonl") print_eval_table(out, r, eval_args, data.size());
      sink.flush(out, outcome);
    } else if (sweep_cmd->parsed()) {
      const std::vector<double> levels = parse_levels(levels_text);
      const std::vector<ImageRecord> data = load_dataset(sweep_args);
      const std::vector<SweepPoint> curve =
          confidence_sweep(data, levels, eval_options(sweep_args));
      JsonSink sink{format == "jsonl", sweep_out, {}};
      if (format != "jsonl") {
        out << "kind " << sweep_args.kind << "  IoU " << fmt(kSweepIou, 2) << "\n";
        out << std::left << std::setw(8) << "level" << std::setw(8) << "kept"
            << std::setw(9) << "AP_gun" << std::setw(10) << "AP_rifle" << "mAP\n";
      }
      for (const SweepPoint& pt : curve) {
        const ClassApEntry& g = pt.result.entry(ClassLabel::kGun, 0);
        const ClassApEntry& f = pt.result.entry(ClassLabel::kRifle, 0);
        ordered_json j;
        j["kind"] = sweep_args.kind;
        j["level"] = pt.level;
        j["kept"] = pt.kept;
        j["ap"] = {{"gun", opt_json(g.ap)}, {"rifle", opt_json(f.ap)}};
        j["map"] = opt_json(pt.map);
        sink.add(j);
        if (format != "jsonl") {
          out << std::left << std::setw(8) << fmt(pt.level, 2) << std::setw(8) << pt.kept
              << std::setw(9) << fmt(g.ap) << std::setw(10) << fmt(f.ap) << fmt(pt.map)
              << "\n";
        }
      }
      sink.flush(out, outcome);
    } else if (synth_cmd->parsed()) {
      const std::vector<SyntheticScene> generated = generate_scenes(seed, scenes, synth_params);
      std::filesystem::create_directories(out_dir);
      std::vector<SceneAnnotation> annotations;
      std::vector<DetectionRecord> dets;
      for (const SyntheticScene& s : generated) {
        annotations.push_back(s.annotations);
        for (const Detection& d : s.oracle_detections) {
          dets.push_back({s.annotations.image_id, d});
        }
      }
      const std::filesystem::path ann_path = std::filesystem::path(out_dir) / "annotations.jsonl";
      const std::filesystem::path det_path = std::filesystem::path(out_dir) / "detections.jsonl";
      save_annotations(ann_path, annotations);
      save_detections(det_path, dets);
      outcome.artifacts = {ann_path, det_path};
      out << "wrote " << annotations.size() << " scenes to " << ann_path.string() << "\n";
      out << "wrote " << dets.size() << " detections to " << det_path.string() << "\n";
    } else if (bench_cmd->parsed()) {
      const std::size_t n = bench_n > 0 ? bench_n
                            : kernel == "iou_obb" ? 200000
                            : kernel == "oaroi"   ? 2000
                                                  : 2000;
      const BenchReport r = bench_kernel(kernel, n);
      if (format == "jsonl") {
        ordered_json j;
        j["kernel"] = r.kernel;
        j["n"] = r.n;
        j["median_items_per_second"] = r.median_items_per_second;
        j["items_per_second"] = r.items_per_second;
        out << j.dump() << '\n';
      } else {
        out << "kernel " << r.kernel << "  n " << r.n << "  median "
            << std::scientific << std::setprecision(3) << r.median_items_per_second
            << " items/s over " << r.items_per_second.size() << " runs\n"
            << std::defaultfloat;
      }
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    outcome.exit_code = kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    outcome.exit_code = kExitFailure;
  }
  return outcome;
}

}  // namespace obbkit::cli
