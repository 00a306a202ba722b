// Serial reference kernels against their OpenMP counterparts.
// Run with --benchmark_counters_tabular=true; set OMP_NUM_THREADS to vary the pool.

#include <benchmark/benchmark.h>

#include <map>

#include "sarsub/enhance.hpp"
#include "sarsub/metrics.hpp"
#include "sarsub/preprocess.hpp"
#include "sarsub/slc_sim.hpp"
#include "sarsub/subaperture.hpp"

using namespace sarsub;

namespace {

const ComplexRaster& slc(int n) {
    static std::map<int, ComplexRaster> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        SceneSpec spec;
        spec.height = n;
        spec.width = n;
        spec.rng_seed = 1;
        it = cache.emplace(n, simulate_slc(spec, RadarParams{}).slc).first;
    }
    return it->second;
}

IntensityRaster unit(int n) {
    return clip_and_normalize(to_db(to_intensity(slc(n))), ClipBounds{-25.0, 10.0});
}

template <bool Parallel>
void Decompose(benchmark::State& state) {
    const auto& s = slc(int(state.range(0)));
    const auto spec = make_spec(s, 3);
    for (auto _ : state) benchmark::DoNotOptimize(Parallel ? decompose(s, spec) : serial::decompose(s, spec));
    state.SetItemsProcessed(state.iterations() * std::int64_t(s.data.size()));
}

template <bool Parallel>
void Lee(benchmark::State& state) {
    const auto in = unit(int(state.range(0))).plane;
    for (auto _ : state) benchmark::DoNotOptimize(Parallel ? lee_filter(in, 7, 1.0) : serial::lee_filter(in, 7, 1.0));
    state.SetItemsProcessed(state.iterations() * std::int64_t(in.size()));
}

template <bool Parallel>
void TiledBoxcar(benchmark::State& state) {
    const std::vector<IntensityRaster> in{unit(int(state.range(0)))};
    EnhancerBinding b;
    b.kind = EnhancerKind::boxcar;
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? enhance_tiled(in, b, TilingPlan{}) : serial::enhance_tiled(in, b, TilingPlan{}));
    state.SetItemsProcessed(state.iterations() * std::int64_t(in[0].plane.size()));
}

template <bool Parallel>
void Ssim(benchmark::State& state) {
    const auto a = unit(int(state.range(0))).plane;
    auto b = lee_filter(a, 5, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(Parallel ? ssim(a, b) : serial::ssim(a, b));
    state.SetItemsProcessed(state.iterations() * std::int64_t(a.size()));
}

template <bool Parallel>
void Histogram(benchmark::State& state) {
    const auto db = to_db(to_intensity(slc(int(state.range(0)))));
    const IntensityRaster* p = &db;
    const std::span<const IntensityRaster* const> s(&p, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? build_histogram(s, kClipHistogramBins)
                                          : serial::build_histogram(s, kClipHistogramBins));
    state.SetItemsProcessed(state.iterations() * std::int64_t(db.plane.size()));
}

}  // namespace

BENCHMARK(Decompose<false>)->Name("decompose/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(Decompose<true>)->Name("decompose/parallel")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(Lee<false>)->Name("lee/serial")->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(Lee<true>)->Name("lee/parallel")->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(TiledBoxcar<false>)->Name("tiled_boxcar/serial")->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(TiledBoxcar<true>)->Name("tiled_boxcar/parallel")->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(Ssim<false>)->Name("ssim/serial")->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(Ssim<true>)->Name("ssim/parallel")->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(Histogram<false>)->Name("histogram/serial")->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(Histogram<true>)->Name("histogram/parallel")->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
