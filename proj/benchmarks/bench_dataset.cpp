#include <benchmark/benchmark.h>

#include <filesystem>

#include "smlmc/dataset.hpp"

namespace {

using namespace smlmc;
namespace fs = std::filesystem;

void BM_LoadGoldenDataset(benchmark::State& state) {
    const fs::path dir = fs::path(SMLMC_FIXTURE_DIR) / "golden_d2";
    std::int64_t bytes = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        bytes += static_cast<std::int64_t>(e.file_size());
    }
    for (auto _ : state) benchmark::DoNotOptimize(load_dataset(dir));
    state.SetBytesProcessed(state.iterations() * bytes);
}
BENCHMARK(BM_LoadGoldenDataset)->Unit(benchmark::kMillisecond);

void BM_GenerateDataset(benchmark::State& state) {
    const fs::path dir = fs::temp_directory_path() / "smlmc-bench-generate";
    GenerateOptions o;
    o.n_samples = state.range(0);
    o.master_seed = 1;
    o.output_dir = dir;
    o.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(generate_dataset("D4", o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
    fs::remove_all(dir);
}
BENCHMARK(BM_GenerateDataset)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
