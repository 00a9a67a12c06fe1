#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fitvol/experiments.hpp"
#include "fitvol/solver.hpp"

using namespace fitvol;

namespace {

MarketModel tp1_model() {
    return {CoefficientSpec::constant(0.3), CoefficientSpec::constant(0.1),
            CoefficientSpec::constant(0.04), 400.0};
}

void BM_StiffnessRows(benchmark::State& state) {
    const Mesh mesh = Mesh::uniform(static_cast<int>(state.range(0)));
    const MarketModel model = tp1_model();
    for (auto _ : state) {
        auto rows = stiffness_rows(0.5, mesh, model);
        benchmark::DoNotOptimize(rows);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StiffnessRows)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_ThomasSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    TridiagonalSystem sys;
    sys.sub.assign(n, 0.0);
    sys.diag.assign(n, 0.0);
    sys.sup.assign(n, 0.0);
    sys.rhs.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        sys.sub[i] = i > 0 ? uc(rng) : 0.0;
        sys.sup[i] = i < n - 1 ? uc(rng) : 0.0;
        sys.diag[i] = 3.0 + uc(rng);
        sys.rhs[i] = uc(rng);
    }
    for (auto _ : state) {
        auto u = thomas_solve(sys);
        benchmark::DoNotOptimize(u);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ThomasSolve)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_AssembleStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Mesh mesh = Mesh::uniform(n);
    const MarketModel model = tp1_model();
    std::vector<double> u(static_cast<unsigned>(n) + 1, 0.5);
    for (auto _ : state) {
        auto sys = assemble_step(u, 0.5, 1e-3, 0.1, mesh, model);
        benchmark::DoNotOptimize(sys);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleStep)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_CallSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Mesh mesh = Mesh::uniform(n);
    const MarketModel model = tp1_model();
    SolverConfig sc;
    sc.horizon = 0.1;
    sc.dt = 1e-3;
    for (auto _ : state) {
        auto sol = solve_evolution(sc, mesh, model, Payoff::call(400.0));
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(BM_CallSolve)->Arg(80)->Arg(320)->Arg(1280);

}  // namespace

BENCHMARK_MAIN();
