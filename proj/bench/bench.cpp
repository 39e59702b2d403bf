// Serial references against the OpenMP kernels. Thread counts are benchmark
// arguments; 0 means one thread per core.

#include <benchmark/benchmark.h>

#include <random>

#include "lbpforge/bgs.hpp"
#include "lbpforge/expr.hpp"
#include "lbpforge/lbp.hpp"
#include "lbpforge/scene.hpp"

using namespace lbpforge;

namespace {

GrayImage noise_frame(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> v(0, 255);
  GrayImage img(w, h);
  for (double& p : img.pixels) p = v(rng);
  return img;
}

const LbpDescriptor& discovered() {
  static const LbpDescriptor d = equation_descriptor(parse("((g_p / g_c) - g_p) + a"), 11.05);
  return d;
}

void BM_LbpImageReference(benchmark::State& state) {
  const GrayImage img = noise_frame(320, 240, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lbp_image_reference(discovered(), img));
  state.SetItemsProcessed(state.iterations() * img.width * img.height);
}
BENCHMARK(BM_LbpImageReference)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_LbpImage(benchmark::State& state) {
  const GrayImage img = noise_frame(320, 240, 1);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lbp_image(discovered(), img, threads));
  state.SetItemsProcessed(state.iterations() * img.width * img.height);
}
BENCHMARK(BM_LbpImage)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

// One model per run; frames cycle through a short synthetic sequence.
template <bool Reference>
void BM_ProcessFrame(benchmark::State& state) {
  SyntheticSceneSpec spec;
  spec.width = 160;
  spec.height = 120;
  spec.frames = 16;
  spec.burn_in = 4;
  const Scene scene = make_synthetic_scene(spec);
  BgsParams params;
  params.region_radius = 3;
  BackgroundModel model(original_lbp(), params, spec.width, spec.height);
  const int threads = static_cast<int>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const GrayImage& f = scene.frames[i++ % scene.frames.size()];
    if constexpr (Reference) {
      benchmark::DoNotOptimize(model.process_frame_reference(f));
    } else {
      benchmark::DoNotOptimize(model.process_frame(f, threads));
    }
  }
  state.SetItemsProcessed(state.iterations() * spec.width * spec.height);
}
BENCHMARK_TEMPLATE(BM_ProcessFrame, true)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_TEMPLATE(BM_ProcessFrame, false)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_TreeEvaluate(benchmark::State& state) {
  const Expression e = parse("((g_p / g_c) - g_p) + a");
  double g = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(e, g, 37.0, 11.05));
    g += 1.0;
  }
}
BENCHMARK(BM_TreeEvaluate);

void BM_CompiledEvaluate(benchmark::State& state) {
  const CompiledExpr c(parse("((g_p / g_c) - g_p) + a"));
  double g = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(c(g, 37.0, 11.05));
    g += 1.0;
  }
}
BENCHMARK(BM_CompiledEvaluate);

}  // namespace

BENCHMARK_MAIN();
