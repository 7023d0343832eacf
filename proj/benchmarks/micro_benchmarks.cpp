#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bnpcms/bnp_models.hpp"
#include "bnpcms/posterior_dp.hpp"
#include "bnpcms/posterior_pyp.hpp"
#include "bnpcms/sketch.hpp"
#include "bnpcms/stable_density.hpp"

namespace {

void BM_SketchUpdate(benchmark::State& state) {
    bnpcms::SketchMatrix sketch(bnpcms::draw_family(2, 320, 7));
    std::mt19937_64 rng(11);
    std::vector<std::uint64_t> ids(4096);
    for (auto& id : ids) id = rng();
    std::size_t i = 0;
    for (auto _ : state) {
        sketch.update(ids[i++ & 4095]);
        benchmark::DoNotOptimize(sketch.stream_length());
    }
}
BENCHMARK(BM_SketchUpdate);

void BM_SketchQuery(benchmark::State& state) {
    bnpcms::SketchMatrix sketch(bnpcms::draw_family(2, 320, 7));
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100000; ++i) sketch.update(rng() % 5000);
    std::vector<std::uint64_t> ids(4096);
    for (auto& id : ids) id = rng() % 5000;
    std::size_t i = 0;
    for (auto _ : state) {
        const bnpcms::HashedRow row = sketch.hashed_row(ids[i++ & 4095]);
        benchmark::DoNotOptimize(bnpcms::cms_estimate(row));
    }
}
BENCHMARK(BM_SketchQuery);

void BM_StableDensitySeries(benchmark::State& state) {
    double x = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bnpcms::stable_logpdf(0.5, x));
        x = x < 40.0 ? x + 0.1 : 1.0;
    }
}
BENCHMARK(BM_StableDensitySeries);

void BM_StableDensityAngular(benchmark::State& state) {
    double x = 0.02;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bnpcms::stable_logpdf(0.8, x));
        x = x < 0.2 ? x * 1.07 : 0.02;
    }
}
BENCHMARK(BM_StableDensityAngular);

void BM_DpPosterior(benchmark::State& state) {
    const auto c = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(bnpcms::dp_posterior_log_pmf(50.0, 320, c));
}
BENCHMARK(BM_DpPosterior)->Arg(32)->Arg(512);

void BM_PypPosteriorExact(benchmark::State& state) {
    bnpcms::PypPosteriorContext ctx({0.5, 1.0}, 10, 50);
    for (auto _ : state)
        benchmark::DoNotOptimize(bnpcms::pyp_posterior_exact(ctx, 25));
}
BENCHMARK(BM_PypPosteriorExact);

void BM_PypPosteriorIntegral(benchmark::State& state) {
    bnpcms::PypPosteriorContext ctx({0.5, 10.0}, 320, 100000);
    ctx.kernel(0);  // builds the mixing-function tables outside the loop
    const auto c = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(bnpcms::pyp_posterior_integral(ctx, c));
}
BENCHMARK(BM_PypPosteriorIntegral)->Arg(32)->Arg(512);

void BM_SampleStream(benchmark::State& state) {
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(bnpcms::sample_stream(10000, {0.5, 10.0}, seed++));
}
BENCHMARK(BM_SampleStream);

}  // namespace

BENCHMARK_MAIN();
