#include <benchmark/benchmark.h>

#include "smlmc/baseline.hpp"
#include "smlmc/dataset.hpp"
#include "smlmc/filtering.hpp"
#include "smlmc/registry.hpp"

namespace {

using namespace smlmc;

void BM_RandomNormal(benchmark::State& state) {
    RandomStream rng(1, 2);
    for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_RandomNormal);

void BM_SimulateAcquisition(benchmark::State& state, const char* condition) {
    const ConditionParams& params = find_condition(condition);
    std::uint64_t id = 0;
    for (auto _ : state) {
        RandomStream rng(7, id++);
        benchmark::DoNotOptimize(simulate_acquisition(params, rng));
    }
}
BENCHMARK_CAPTURE(BM_SimulateAcquisition, D2, "D2");
BENCHMARK_CAPTURE(BM_SimulateAcquisition, P2, "P2");
BENCHMARK_CAPTURE(BM_SimulateAcquisition, D6, "D6")->Unit(benchmark::kMillisecond);

void BM_GenerateSample(benchmark::State& state, const char* condition) {
    const ConditionParams& params = find_condition(condition);
    std::uint64_t id = 0;
    for (auto _ : state) {
        RandomStream rng(7, id++);
        benchmark::DoNotOptimize(generate_sample(params, rng));
    }
}
BENCHMARK_CAPTURE(BM_GenerateSample, D2, "D2");
BENCHMARK_CAPTURE(BM_GenerateSample, D4, "D4");

void BM_DetectionFilter(benchmark::State& state) {
    RandomStream rng(3, 3);
    const Acquisition acq = simulate_acquisition(find_condition("P4"), rng);
    for (auto _ : state) benchmark::DoNotOptimize(apply_detection_filter(acq.records, 500.0));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(acq.records.size()));
}
BENCHMARK(BM_DetectionFilter)->Unit(benchmark::kMillisecond);

void BM_ClusterBaseline(benchmark::State& state) {
    RandomStream rng(11, 0);
    const FilteredSample s = generate_sample(find_condition("D2"), rng);
    BaselineConfig cfg;
    cfg.n_out = static_cast<std::int64_t>(s.retained_emitters.size());
    cfg.n_restarts = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(cluster_predict(s.localizations, cfg));
}
BENCHMARK(BM_ClusterBaseline)->Arg(1)->Arg(8);

}  // namespace
