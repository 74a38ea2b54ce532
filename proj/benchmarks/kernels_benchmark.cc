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

#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "obbkit/geometry.h"
#include "obbkit/nms.h"
#include "obbkit/opg.h"
#include "obbkit/pooling.h"

namespace obbkit {
namespace {

OrientedBox RandomBox(std::mt19937_64& rng, double extent) {
  std::uniform_real_distribution<double> pos(0.0, extent);
  std::uniform_real_distribution<double> half(2.0, extent / 8);
  std::uniform_real_distribution<double> ang(0.0, 180.0);
  return {pos(rng), pos(rng), half(rng), half(rng), ang(rng)};
}

void BM_IouObb(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<OrientedBox> a, b;
  for (int i = 0; i < 1024; ++i) {
    a.push_back(RandomBox(rng, 64));
    OrientedBox o = RandomBox(rng, 64);
    o.cx = a.back().cx + (o.cx - 32) / 8;
    o.cy = a.back().cy + (o.cy - 32) / 8;
    b.push_back(o);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou_obb(a[i], b[i]));
    i = (i + 1) & 1023;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_IouObb);

void BM_IouAabb(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<AxisAlignedBox> a, b;
  for (int i = 0; i < 1024; ++i) {
    a.push_back(enclosing_aabb(RandomBox(rng, 64)));
    b.push_back(enclosing_aabb(RandomBox(rng, 64)));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou_aabb(a[i], b[i]));
    i = (i + 1) & 1023;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_IouAabb);

void BM_MakeOrp(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<AxisAlignedBox> boxes;
  std::vector<double> thetas;
  std::uniform_real_distribution<double> ang(0.0, 180.0);
  for (int i = 0; i < 1024; ++i) {
    boxes.push_back(enclosing_aabb(RandomBox(rng, 256)));
    thetas.push_back(ang(rng));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_orp(boxes[i], thetas[i]));
    i = (i + 1) & 1023;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MakeOrp);

void BM_OaroiPool(benchmark::State& state) {
  const int channels = static_cast<int>(state.range(0));
  FeatureGrid fm(128, 128, channels);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> val(0.0f, 1.0f);
  for (float& v : fm.values()) v = val(rng);
  std::vector<OrientedBox> props;
  for (int i = 0; i < 256; ++i) props.push_back(RandomBox(rng, 128));
  std::vector<float> out(static_cast<std::size_t>(kDefaultPoolSize) * kDefaultPoolSize * channels);
  std::size_t i = 0;
  for (auto _ : state) {
    oaroi_pool_into(fm, props[i], kDefaultPoolSize, kDefaultPoolSize, out);
    benchmark::DoNotOptimize(out.data());
    i = (i + 1) & 255;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_OaroiPool)->Arg(16)->Arg(64)->Arg(256);

void BM_NmsOriented(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<Detection> dets;
  for (int i = 0; i < state.range(0); ++i) {
    dets.push_back({i % 2 ? ClassLabel::kGun : ClassLabel::kRifle, score(rng),
                    RandomBox(rng, 512)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(nms_indices(dets, 0.5, BoxKind::kOriented));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NmsOriented)->Arg(200)->Arg(2000);

}  // namespace
}  // namespace obbkit

BENCHMARK_MAIN();
