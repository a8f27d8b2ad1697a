#include <benchmark/benchmark.h>

#include <random>

#include "nseg/nseg.hpp"

using namespace nseg;

namespace {

LabelMask blocks(int size, int classes) {
  std::mt19937_64 gen(1);
  LabelMask m(size, size, classes);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      m.at(x, y) = static_cast<std::uint8_t>(((x / 16) + (y / 16) * 3 + gen() % 2) % classes);
  return m;
}

void BM_Field(benchmark::State& state) {
  const double sigma = static_cast<double>(state.range(0));
  const int size = static_cast<int>(state.range(1));
  std::int64_t i = 0;
  for (auto _ : state) {
    RandomStream rng = derive_stream(1, i++, 0);
    benchmark::DoNotOptimize(generate_displacement_field(size, size, {30.0, sigma}, rng));
  }
  state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_Field)->ArgsProduct({{3, 5, 10}, {256, 512}})->Unit(benchmark::kMillisecond);

void BM_Warp(benchmark::State& state) {
  const int size = 512;
  const LabelMask mask = blocks(size, 6);
  RandomStream rng = derive_stream(2, 0, 0);
  const auto field = generate_displacement_field(size, size, {30.0, 5.0}, rng);
  WarpSpec spec;
  spec.mapping = state.range(0) == 0 ? Mapping::forward : Mapping::backward;
  for (auto _ : state) benchmark::DoNotOptimize(warp_label(mask, field, spec));
  state.SetLabel(state.range(0) == 0 ? "forward" : "backward");
  state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_Warp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_NSegment512(benchmark::State& state) {
  const LabelMask mask = blocks(512, 6);
  AugmentConfig config;
  config.p = 1.0;
  std::int64_t i = 0;
  for (auto _ : state) {
    RandomStream rng = derive_stream(3, i++, 0);
    benchmark::DoNotOptimize(nsegment(mask, config, rng));
  }
}
BENCHMARK(BM_NSegment512)->Unit(benchmark::kMillisecond);

void BM_Components(benchmark::State& state) {
  const LabelMask mask = blocks(512, 6);
  for (auto _ : state) {
    AreaReport r;
    r.add(mask);
    benchmark::DoNotOptimize(r.total_components());
  }
}
BENCHMARK(BM_Components)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
