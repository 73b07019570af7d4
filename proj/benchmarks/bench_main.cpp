#include <benchmark/benchmark.h>

#include <random>

#include "isospec/config.hpp"

using namespace isospec;

namespace {

RunConfig acceptance() {
    RunConfig c;
    c.v0 = 2;
    c.locals = {{2, LevelKind::RamifiedFull, 0}, {3, LevelKind::RamifiedFull, 0}, {5, LevelKind::SymmetricCongruence, 1}};
    c.conjugator = {LocalConjugator{5, std::array<Rat, 4>{Rat(2), Rat(0), Rat(0), Rat(1)}}};
    return c;
}

void BM_HilbertSymbols(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<long> d(1, 1000000);
    std::vector<std::pair<Rat, Rat>> pairs;
    for (int i = 0; i < 256; ++i) pairs.emplace_back(Rat(d(rng) - 500000), Rat(d(rng)));
    for (auto _ : state)
        for (const auto& [a, b] : pairs)
            for (const auto& v : candidate_places(a, b)) benchmark::DoNotOptimize(hilbert_symbol(a, b, v));
    state.SetItemsProcessed(state.iterations() * pairs.size());
}
BENCHMARK(BM_HilbertSymbols);

void BM_SolveNormOne(benchmark::State& state) {
    const Order o = make_order(RunConfig{});
    for (auto _ : state) benchmark::DoNotOptimize(solve_norm_one(o, state.range(0), 1));
}
BENCHMARK(BM_SolveNormOne)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_EnumerateLattice(benchmark::State& state) {
    const RunConfig c = acceptance();
    const Order o = make_order(c);
    const GlobalLevel level = make_level(c, o);
    const Conjugator x = state.range(1) ? make_conjugator(c) : Conjugator{};
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_lattice(level, x, state.range(0), 1));
}
BENCHMARK(BM_EnumerateLattice)->Args({30, 0})->Args({30, 1})->Args({60, 0})->Args({60, 1})->Unit(benchmark::kMillisecond);

void BM_NormalizerClasses(benchmark::State& state) {
    const auto kind = static_cast<LevelKind>(state.range(0));
    const LocalLevel level{5, kind, static_cast<int>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(normalizer_norm_classes(level, 3, 3));
}
BENCHMARK(BM_NormalizerClasses)
    ->Args({static_cast<int>(LevelKind::Hyperspecial), 0})
    ->Args({static_cast<int>(LevelKind::PrincipalCongruence), 1})
    ->Args({static_cast<int>(LevelKind::HeckeCongruence), 1})
    ->Args({static_cast<int>(LevelKind::HeckeCongruence), 2})
    ->Args({static_cast<int>(LevelKind::SymmetricCongruence), 1})
    ->Unit(benchmark::kMillisecond);

void BM_MultiplicitySweep(benchmark::State& state) {
    SweepOptions o;
    o.max_places = static_cast<int>(state.range(0));
    o.threads = 1;
    std::uint64_t identities = 0;
    for (auto _ : state) identities = sweep(o).identities;
    state.counters["identities"] = static_cast<double>(identities);
}
BENCHMARK(BM_MultiplicitySweep)->DenseRange(3, 5)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
