#include <benchmark/benchmark.h>

#include <cmath>

#include "rearr/fixtures.hpp"
#include "rearr/geometry.hpp"
#include "rearr/grid.hpp"
#include "rearr/inequalities.hpp"
#include "rearr/orlicz.hpp"
#include "rearr/rearrange.hpp"

using namespace rearr;

namespace {

void BM_DecreasingRearrangement(benchmark::State& state) {
    const int cells = static_cast<int>(state.range(0));
    GridFunction u = fixtures::random_square(cells, 12345);
    for (auto _ : state) {
        benchmark::DoNotOptimize(decreasing_rearrangement(u));
    }
    state.SetItemsProcessed(state.iterations() * u.cell_count());
}
BENCHMARK(BM_DecreasingRearrangement)->Arg(64)->Arg(128)->Arg(256)->Arg(512);

void BM_SymmetrizedEnergy(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    GridFunction u = fixtures::radial_bump_disk(h);
    for (auto _ : state) {
        benchmark::DoNotOptimize(symmetrized_profile_energy(u, 0.0, u.domain().measure()));
    }
    state.SetItemsProcessed(state.iterations() * u.cell_count());
}
BENCHMARK(BM_SymmetrizedEnergy)->Arg(64)->Arg(128)->Arg(256);

void BM_PerimeterScan(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    GridFunction u = fixtures::two_bump_square(h);
    const double gamma = 2.0 * std::sqrt(M_PI);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scan_perimeter_condition(u, gamma));
    }
}
BENCHMARK(BM_PerimeterScan)->Arg(64)->Arg(128)->Arg(256);

void BM_ConstantSearch(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    Domain square = fixtures::unit_square(h);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_Q(square));
    }
}
BENCHMARK(BM_ConstantSearch)->Arg(32)->Arg(64)->Arg(128);

void BM_LuxemburgNorm(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    GridFunction u = fixtures::two_bump_square(h);
    NFunction A = NFunction::power_log(2.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(luxemburg_norm(u, A));
    }
}
BENCHMARK(BM_LuxemburgNorm)->Arg(64)->Arg(128)->Arg(256);

void BM_Gradient(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    GridFunction u = fixtures::cosine_square(h);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dirichlet_energy(u));
    }
    state.SetItemsProcessed(state.iterations() * u.cell_count());
}
BENCHMARK(BM_Gradient)->Arg(64)->Arg(128)->Arg(256)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
