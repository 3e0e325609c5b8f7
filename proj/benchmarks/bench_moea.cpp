#include <benchmark/benchmark.h>

#include <vector>

#include "trigopt/moea.hpp"
#include "trigopt/rng.hpp"

namespace {

std::vector<trigopt::ObjectiveVector> random_objectives(std::size_t n, std::uint64_t seed) {
    trigopt::Rng rng(seed);
    std::vector<trigopt::ObjectiveVector> out(n);
    for (auto& o : out) {
        o.o1 = rng.uniform();
        o.o2 = rng.uniform();
        o.o3 = rng.uniform(0.0, 8.0);
    }
    return out;
}

void bm_nd_sort(benchmark::State& state) {
    auto objs = random_objectives(static_cast<std::size_t>(state.range(0)), 31);
    for (auto _ : state) {
        auto fronts = trigopt::nd_sort(objs);
        benchmark::DoNotOptimize(fronts.data());
    }
}

void bm_select(benchmark::State& state) {
    auto objs = random_objectives(static_cast<std::size_t>(state.range(0)), 32);
    trigopt::PreferenceRegion pref{0.4, 0.4, 4.0};
    for (auto _ : state) {
        auto picked = trigopt::rnd_sort_select_indices(objs, objs.size() / 2, pref);
        benchmark::DoNotOptimize(picked.data());
    }
}

void bm_variation(benchmark::State& state) {
    auto region = trigopt::low_freq_region(16, 16, 0.183);
    trigopt::EAConfig cfg;
    cfg.population = static_cast<int>(state.range(0));
    trigopt::Rng rng(33);
    std::vector<trigopt::Member> parents;
    for (int i = 0; i < cfg.population; ++i) {
        trigopt::Member m{trigopt::random_trigger(region, cfg.n_bands, cfg.epsilon, rng),
                          {rng.uniform(), rng.uniform(), rng.uniform(0.0, 8.0)},
                          0.0,
                          0.0};
        parents.push_back(std::move(m));
    }
    for (auto _ : state) {
        trigopt::Rng step(rng.next_u64());
        auto kids = trigopt::make_offspring(parents, cfg, step);
        benchmark::DoNotOptimize(kids.data());
    }
}

}  // namespace

BENCHMARK(bm_nd_sort)->Arg(50)->Arg(200);
BENCHMARK(bm_select)->Arg(50)->Arg(200);
BENCHMARK(bm_variation)->Arg(10)->Arg(40);

BENCHMARK_MAIN();
