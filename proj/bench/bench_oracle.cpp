// Serial reference vs OpenMP kernels for the oracles.

#include "exactrc/channel.hpp"
#include "exactrc/exponent.hpp"
#include "exactrc/oracle.hpp"

#include <benchmark/benchmark.h>

using namespace exactrc;

namespace {

DiscreteChannel bsc(double p) { return DiscreteChannel({{1.0 - p, p}, {p, 1.0 - p}}, {0.5, 0.5}); }

DiscreteChannel erasure3()
{
    return DiscreteChannel({{0.6, 0.0, 0.0, 0.4}, {0.0, 0.6, 0.0, 0.4}, {0.0, 0.0, 0.6, 0.4}},
                           {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

void exact_reference(benchmark::State& st)
{
    const auto ch = erasure3();
    const long n = st.range(0);
    const auto cb = codebook_size(0.3, n);
    for (auto _ : st)
        benchmark::DoNotOptimize(exact_prc_reference(ch, n, cb.m, TieRule::UniformRandom).value);
}

void exact_parallel(benchmark::State& st)
{
    const auto ch = erasure3();
    const long n = st.range(0);
    const auto cb = codebook_size(0.3, n);
    ExactOptions o;
    o.threads = static_cast<int>(st.range(1));
    for (auto _ : st)
        benchmark::DoNotOptimize(exact_prc(ch, n, cb.m, TieRule::UniformRandom, o).value);
}

void mc(benchmark::State& st)
{
    const auto ch = bsc(0.11);
    const double rate = 0.5 * (critical_rate(ch) + mutual_information(ch));
    const long n = 128;
    const auto cb = codebook_size(rate, n);
    const auto ra = solve_exponent(ch, cb.rate);
    McOptions o;
    o.samples = 20000;
    o.threads = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(mc_prc(ch, ra, n, cb.m, TieRule::UniformRandom, o).value);
}

} // namespace

BENCHMARK(exact_reference)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(exact_parallel)->ArgsProduct({{12, 24}, {1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(mc)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
