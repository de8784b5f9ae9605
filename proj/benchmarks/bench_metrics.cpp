#include <benchmark/benchmark.h>

#include "smlmc/metrics.hpp"
#include "smlmc/random.hpp"

namespace {

using namespace smlmc;

std::vector<Point> points(std::uint64_t seed, std::size_t n) {
    RandomStream rng(seed, n);
    std::vector<Point> out(n);
    for (auto& p : out) p = {rng.uniform() * 500.0, rng.uniform() * 500.0};
    return out;
}

void BM_Hungarian(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto pred = points(1, n), truth = points(2, n);
    for (auto _ : state) benchmark::DoNotOptimize(hungarian_assignment(pred, truth));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(4, 256)->Complexity(benchmark::oNCubed);

void BM_Chamfer(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto pred = points(3, n), truth = points(4, n);
    for (auto _ : state) benchmark::DoNotOptimize(chamfer_distance(pred, truth));
}
BENCHMARK(BM_Chamfer)->Arg(7)->Arg(64);

void BM_DetectionReport(benchmark::State& state) {
    const auto pred = points(5, 9), truth = points(6, 9);
    for (auto _ : state) benchmark::DoNotOptimize(detection_report(pred, truth));
}
BENCHMARK(BM_DetectionReport);

}  // namespace
