#include <benchmark/benchmark.h>

#include <vector>

#include "mvstab/analysis.hpp"
#include "mvstab/measure.hpp"
#include "mvstab/rng.hpp"
#include "mvstab/sim.hpp"

using namespace mvstab;

namespace {

const LinearMeanFieldParams kExample{2.0, 1.0, 1.0, 8.0, 3.0};

EmpiricalMeasure random_cloud(int n, int d, std::uint64_t seed) {
    EmpiricalMeasure m;
    m.N = n;
    m.d = d;
    m.samples.resize(static_cast<std::size_t>(n) * d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            m.samples[static_cast<std::size_t>(i) * d + j] =
                rng::standard_normal(seed, i, 0, j);
    return m;
}

void BM_ParticleStep(benchmark::State& state) {
    SimConfig cfg;
    cfg.N = static_cast<int>(state.range(0));
    cfg.dt = 1e-3;
    cfg.delta = 1e-2;
    cfg.T = 0.1;
    cfg.x0 = {1.0};
    cfg.record_stride = 100;
    const auto model = linear_model(kExample);
    for (auto _ : state) {
        auto rec = run_particle_system(model, cfg, static_cast<int>(state.range(1)));
        benchmark::DoNotOptimize(rec.msq.back());
    }
    state.SetItemsProcessed(state.iterations() * cfg.num_steps() * cfg.N);
}
BENCHMARK(BM_ParticleStep)
    ->Args({2000, 1})
    ->Args({20000, 1})
    ->Args({20000, 4})
    ->Unit(benchmark::kMillisecond);

void BM_W2Exact(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto a = random_cloud(n, 2, 1);
    const auto b = random_cloud(n, 2, 2);
    for (auto _ : state) benchmark::DoNotOptimize(wasserstein2_exact(a, b));
}
BENCHMARK(BM_W2Exact)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_W2Sliced(benchmark::State& state) {
    const auto a = random_cloud(4096, 3, 3);
    const auto b = random_cloud(4096, 3, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(wasserstein2_sliced(a, b, 32, 7));
}
BENCHMARK(BM_W2Sliced)->Unit(benchmark::kMillisecond);

void BM_MomentOracle(benchmark::State& state) {
    for (auto _ : state) {
        auto path = moment_ode_oracle(kExample, 1.0, 0.01, 3.0, 1e-3);
        benchmark::DoNotOptimize(path.m2.back());
    }
}
BENCHMARK(BM_MomentOracle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
