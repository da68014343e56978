// Compares the OpenMP Riemann-sum kernel against the serial reference on the
// grids the sewing loop actually visits, and times a small tiled solve under
// different worker counts.

#include <benchmark/benchmark.h>

#include <hypersew/fields.hpp>
#include <hypersew/grid.hpp>
#include <hypersew/increment.hpp>
#include <hypersew/runtime.hpp>
#include <hypersew/sewing.hpp>
#include <hypersew/solver.hpp>

#include <cmath>
#include <cstdint>

using namespace hypersew;

namespace {

PairFunction rough_integrand() {
    Field y = weierstrass_field(HolderExponents({0.7, 0.7}), 16);
    Field x = weierstrass_field(HolderExponents({0.8, 0.8}), 16);
    return young_pair(y, x);
}

void bm_riemann_parallel(benchmark::State& state) {
    const auto level = static_cast<unsigned>(state.range(0));
    PairFunction xi = rough_integrand();
    GridPartition grid = dyadic_partition(unit_cube(2), {level, level});
    for (auto _ : state) benchmark::DoNotOptimize(riemann_sum(xi, grid));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(grid.cell_count()));
}

void bm_riemann_serial(benchmark::State& state) {
    const auto level = static_cast<unsigned>(state.range(0));
    PairFunction xi = rough_integrand();
    GridPartition grid = dyadic_partition(unit_cube(2), {level, level});
    for (auto _ : state) benchmark::DoNotOptimize(riemann_sum_serial(xi, grid));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(grid.cell_count()));
}

void bm_solve_threads(benchmark::State& state) {
    const auto workers = static_cast<unsigned>(state.range(0));
    const unsigned saved = max_threads();
    set_max_threads(workers);
    GridPartition grid = dyadic_partition(unit_cube(2), {6, 6});
    Field x = weierstrass_field(HolderExponents({0.75, 0.75}), 16);
    Field xi = Field::closed_form(2, [](const MultiPoint&) { return 1.0; });
    Coefficient coeff([](double y) { return std::sin(y); },
                      [](double y) { return std::cos(y); }, 1.0);
    Problem problem{coeff, xi, x, grid};
    for (auto _ : state) {
        Solution sol = solve(problem, {0.5, 0.5}, 1e-8);
        benchmark::DoNotOptimize(sol.residual);
    }
    set_max_threads(saved);
}

} // namespace

BENCHMARK(bm_riemann_parallel)->Arg(5)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_riemann_serial)->Arg(5)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_solve_threads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
