#include <benchmark/benchmark.h>
#include <thread>

#include "wqed/pulse.hpp"

using namespace wqed;

namespace {

TimeGrid grid(int steps) {
    TimeGrid g;
    g.t_max = 10.0;
    g.steps = steps;
    return g;
}

const Spectra& spectra(int n) {
    static std::vector<Spectra> cache = [] {
        std::vector<Spectra> out;
        for (int k = 0; k <= 8; ++k)
            out.push_back(k >= 2 ? Spectra::compute({k, 0.1}) : Spectra{});
        return out;
    }();
    return cache[n];
}

// Direct kernel sum, serial.
void BM_reference(benchmark::State& st) {
    const Spectra& s = spectra(int(st.range(0)));
    ModeMask mask = ModeMask::full(s.single.size(), s.pairs.size());
    for (auto _ : st)
        benchmark::DoNotOptimize(wavefunction_grid_reference(s, mask, grid(int(st.range(1)))));
    st.SetItemsProcessed(st.iterations() * (st.range(1) + 1) * (st.range(1) + 2) / 2);
}

// Exponential-sum evaluator at a fixed thread count (0 = all available).
void grid_with_threads(benchmark::State& st, int threads) {
    int saved = thread_count();
    set_thread_count(threads > 0 ? threads : int(std::thread::hardware_concurrency()));
    PulseModel model(spectra(int(st.range(0))),
                     ModeMask::full(int(st.range(0)), int(st.range(0) * (st.range(0) - 1) / 2)));
    for (auto _ : st)
        benchmark::DoNotOptimize(wavefunction_grid(model, grid(int(st.range(1)))));
    st.counters["threads"] = thread_count();
    st.SetItemsProcessed(st.iterations() * (st.range(1) + 1) * (st.range(1) + 2) / 2);
    set_thread_count(saved);
}

void BM_expsum_serial(benchmark::State& st) { grid_with_threads(st, 1); }
void BM_expsum_openmp(benchmark::State& st) { grid_with_threads(st, 0); }

}  // namespace

BENCHMARK(BM_reference)->Args({4, 40})->Args({6, 20})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_expsum_serial)->Args({4, 40})->Args({4, 400})->Args({6, 20})->Args({8, 200})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_expsum_openmp)->Args({4, 40})->Args({4, 400})->Args({6, 20})->Args({8, 200})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
