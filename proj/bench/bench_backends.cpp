#include <random>

#include <benchmark/benchmark.h>

#include "hbd/anneal.hpp"
#include "hbd/benders.hpp"
#include "hbd/uc.hpp"

using namespace hbd;

namespace {

QuboProblem random_qubo(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> w(-1.0, 1.0);
    std::bernoulli_distribution keep(0.3);
    std::vector<QuboTerm> terms;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (i == j || keep(rng)) terms.push_back({i, j, w(rng)});
    return make_qubo(n, std::move(terms));
}

void BM_AnnealSerial(benchmark::State& st) {
    auto q = random_qubo(static_cast<std::size_t>(st.range(0)), 1);
    for (auto _ : st) benchmark::DoNotOptimize(sample_qubo_serial(q, 32, 200, 7));
}

void BM_AnnealParallel(benchmark::State& st) {
    auto q = random_qubo(static_cast<std::size_t>(st.range(0)), 1);
    for (auto _ : st) benchmark::DoNotOptimize(sample_qubo(q, 32, 200, 7));
}

void BM_BruteForceSerial(benchmark::State& st) {
    auto q = random_qubo(static_cast<std::size_t>(st.range(0)), 2);
    for (auto _ : st) benchmark::DoNotOptimize(brute_force_qubo_serial(q));
}

void BM_BruteForceParallel(benchmark::State& st) {
    auto q = random_qubo(static_cast<std::size_t>(st.range(0)), 2);
    for (auto _ : st) benchmark::DoNotOptimize(brute_force_qubo(q));
}

void BM_UcExact(benchmark::State& st) {
    auto m = build_uc(builtin_6bus(), static_cast<int>(st.range(0)));
    auto eq = to_equality_form(m.mip, 1.0, required_q_bits(m.mip, 1.0));
    EngineConfig cfg;
    cfg.backend = Backend::exact;
    cfg.alpha_bar_value = 1000.0;
    for (auto _ : st) benchmark::DoNotOptimize(run_benders(eq.mip, cfg));
}

}  // namespace

BENCHMARK(BM_AnnealSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnnealParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceSerial)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceParallel)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UcExact)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
