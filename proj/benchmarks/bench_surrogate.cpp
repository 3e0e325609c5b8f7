#include <benchmark/benchmark.h>

#include <vector>

#include "trigopt/rng.hpp"
#include "trigopt/surrogate.hpp"

namespace {

std::vector<trigopt::LabeledSample> toy_dataset(int per_class, int classes, int side,
                                                std::uint64_t seed) {
    trigopt::Rng rng(seed);
    std::vector<trigopt::LabeledSample> out;
    out.reserve(static_cast<std::size_t>(per_class) * classes);
    for (int c = 0; c < classes; ++c) {
        for (int i = 0; i < per_class; ++i) {
            trigopt::LabeledSample s;
            s.label = c;
            s.image = trigopt::ImageTensor::zeros(side, side, 3);
            for (auto& v : s.image.data) v = rng.uniform();
            out.push_back(std::move(s));
        }
    }
    return out;
}

void bm_train_epoch(benchmark::State& state) {
    const bool use_mlp = state.range(0) != 0;
    auto data = toy_dataset(50, 4, 16, 99);
    trigopt::TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 32;
    cfg.seed = 7;
    for (auto _ : state) {
        auto model = use_mlp
                         ? trigopt::ClassifierModel::mlp(16 * 16 * 3, 64, 4, 3)
                         : trigopt::ClassifierModel::logistic(16 * 16 * 3, 4, 3);
        model = trigopt::train(std::move(model), data, cfg);
        benchmark::DoNotOptimize(model.parameters().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}

}  // namespace

BENCHMARK(bm_train_epoch)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
