#include <benchmark/benchmark.h>

#include "crforge/manifold.hpp"
#include "crforge/reflection.hpp"

#include <random>

using namespace crforge;

namespace {

Series random_series(std::mt19937_64& rng, int nvars, int order, int maxdeg) {
    Series s(nvars, order);
    std::uniform_int_distribution<int> num(-4, 4);
    for (const auto& m : monos_upto(nvars, static_cast<std::uint32_t>(maxdeg)))
        if (rng() % 3) s.set_coeff(m, Coeff(num(rng), 1, num(rng), 2));
    return s;
}

GenericManifold make_quadric(int order) {
    Series rho = (Series::variable(4, order, 1) - Series::variable(4, order, 3))
                     .scaled(Coeff(0, 1, -1, 2)) -
                 Series::variable(4, order, 0) * Series::variable(4, order, 2);
    return GenericManifold::from_defining(SeriesMap({rho}), 2, 1, order, "q");
}

GenericManifold make_twist_manifold(int order) {
    auto v = [&](int i) { return Series::variable(6, order, i); };
    Series rho = (v(2) - v(5)).scaled(Coeff(0, 1, -1, 2)) - v(0) * v(1) * v(3) * v(4);
    return GenericManifold::from_defining(SeriesMap({rho}), 3, 1, order, "r29");
}

} // namespace

static void BM_SeriesMul(benchmark::State& state) {
    const int nv = static_cast<int>(state.range(0));
    const int order = static_cast<int>(state.range(1));
    std::mt19937_64 rng(7);
    Series a = random_series(rng, nv, order, order / 2);
    Series b = random_series(rng, nv, order, order / 2);
    for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_SeriesMul)->Args({2, 8})->Args({3, 8})->Args({3, 10})->Unit(benchmark::kMicrosecond);

static void BM_Compose(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    std::mt19937_64 rng(11);
    Series f = random_series(rng, 2, order, 4);
    Series g1 = random_series(rng, 3, order, 3);
    Series g2 = random_series(rng, 3, order, 3);
    g1.set_coeff(Mono(3), Coeff::zero());
    g2.set_coeff(Mono(3), Coeff::zero());
    SeriesMap g({g1, g2});
    for (auto _ : state) benchmark::DoNotOptimize(compose(f, g));
}
BENCHMARK(BM_Compose)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMicrosecond);

static void BM_ImplicitSolve(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    Series rho = Series::variable(2, order, 1) - Series::variable(2, order, 0) -
                 Series::monomial(2, order, Mono(std::vector<std::uint32_t>{0, 2}), Coeff(1));
    SeriesMap sys({rho});
    for (auto _ : state) benchmark::DoNotOptimize(implicit_solve(sys, {1}));
}
BENCHMARK(BM_ImplicitSolve)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

static void BM_SegreTower(benchmark::State& state) {
    const int levels = static_cast<int>(state.range(0));
    GenericManifold M = make_twist_manifold(8);
    SegreMapping g = SegreMapping::standard(M);
    for (auto _ : state) benchmark::DoNotOptimize(SegreTower(M, g, levels));
}
BENCHMARK(BM_SegreTower)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_PsiSystem(benchmark::State& state) {
    const int l = static_cast<int>(state.range(0));
    GenericManifold M = make_quadric(8);
    MapGerm id2(SeriesMap::identity(2, 8), 2, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_system(M, M, id2, SystemKind::Psi, l, 0));
}
BENCHMARK(BM_PsiSystem)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_SendsInto(benchmark::State& state) {
    GenericManifold M = make_twist_manifold(static_cast<int>(state.range(0)));
    MapGerm id3(SeriesMap::identity(3, M.order()), 3, 3);
    for (auto _ : state) benchmark::DoNotOptimize(sends_into(M, M, id3));
}
BENCHMARK(BM_SendsInto)->Arg(8)->Arg(10)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
