#include <benchmark/benchmark.h>

#include "trigopt/rng.hpp"
#include "trigopt/spectrum.hpp"
#include "trigopt/trigger.hpp"

namespace {

trigopt::ImageTensor random_image(int side, int channels, std::uint64_t seed) {
    trigopt::Rng rng(seed);
    auto img = trigopt::ImageTensor::zeros(side, side, channels);
    for (auto& v : img.data) v = rng.uniform();
    return img;
}

void bm_dct2(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    auto img = random_image(side, 3, 17);
    for (auto _ : state) {
        auto spec = trigopt::dct2(img);
        benchmark::DoNotOptimize(spec.coeffs.data());
    }
    state.SetItemsProcessed(state.iterations() * img.value_count());
}

void bm_roundtrip(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    auto img = random_image(side, 3, 18);
    for (auto _ : state) {
        auto back = trigopt::idct2(trigopt::dct2(img));
        benchmark::DoNotOptimize(back.data.data());
    }
    state.SetItemsProcessed(state.iterations() * img.value_count());
}

void bm_inject(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    auto img = random_image(side, 3, 19);
    auto region = trigopt::low_freq_region(side, side, 0.183);
    trigopt::Rng rng(20);
    auto trig = trigopt::random_trigger(region, 3, 0.5, rng);
    for (auto _ : state) {
        auto poisoned = trigopt::inject(img, trig);
        benchmark::DoNotOptimize(poisoned.data.data());
    }
}

}  // namespace

BENCHMARK(bm_dct2)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(bm_roundtrip)->Arg(16)->Arg(32);
BENCHMARK(bm_inject)->Arg(16)->Arg(32);

BENCHMARK_MAIN();
