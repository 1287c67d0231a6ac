// Serial reference vs OpenMP kernels over a range of grid sizes.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "capgcf/cap_domain.hpp"
#include "capgcf/kernels.hpp"

namespace {

using namespace capgcf;

struct Fixture {
    GridPtr grid;
    std::vector<double> h, radial, tangential, rhs, stability, out;

    explicit Fixture(int nodes)
        : grid(build_grid(1, std::numbers::pi / 3, nodes, GridMode::Full1D)),
          h(grid->ell().begin(), grid->ell().end()),
          radial(h.size()),
          tangential(h.size()),
          rhs(h.size()),
          stability(h.size()),
          out(h.size()) {
        for (std::size_t i = 0; i < h.size(); ++i) h[i] *= 1.0 + 0.05 * std::cos(3.0 * static_cast<double>(i) / h.size());
        kernels::serial::principal_radii(*grid, h, radial, tangential);
    }
};

template <bool Parallel>
void principal_radii(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::parallel::principal_radii(*f.grid, f.h, f.radial, f.tangential);
        else
            kernels::serial::principal_radii(*f.grid, f.h, f.radial, f.tangential);
        benchmark::DoNotOptimize(f.radial.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void flow_rhs(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)));
    const kernels::FlowTerms terms{};
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::parallel::flow_rhs(*f.grid, f.h, f.radial, f.tangential, terms, f.rhs, f.stability);
        else
            kernels::serial::flow_rhs(*f.grid, f.h, f.radial, f.tangential, terms, f.rhs, f.stability);
        benchmark::DoNotOptimize(f.rhs.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void second_derivative(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::parallel::second_derivative(*f.grid, f.h, f.out);
        else
            kernels::serial::second_derivative(*f.grid, f.h, f.out);
        benchmark::DoNotOptimize(f.out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void weighted_sum(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)));
    const auto w = f.grid->weights();
    for (auto _ : state) {
        double s = Parallel ? kernels::parallel::weighted_sum(w, f.h) : kernels::serial::weighted_sum(w, f.h);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

#define CAPGCF_SIZES ->Arg(201)->Arg(4097)->Arg(65537)->Arg(1048577)

BENCHMARK(principal_radii<false>) CAPGCF_SIZES;
BENCHMARK(principal_radii<true>) CAPGCF_SIZES->UseRealTime();
BENCHMARK(flow_rhs<false>) CAPGCF_SIZES;
BENCHMARK(flow_rhs<true>) CAPGCF_SIZES->UseRealTime();
BENCHMARK(second_derivative<false>) CAPGCF_SIZES;
BENCHMARK(second_derivative<true>) CAPGCF_SIZES->UseRealTime();
BENCHMARK(weighted_sum<false>) CAPGCF_SIZES;
BENCHMARK(weighted_sum<true>) CAPGCF_SIZES->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
