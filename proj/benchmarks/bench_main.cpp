#include <benchmark/benchmark.h>

#include "eitsim/linearization.hpp"
#include "eitsim/model.hpp"
#include "eitsim/oracle.hpp"
#include "eitsim/spectra.hpp"
#include "eitsim/sweep.hpp"

using namespace eitsim;

namespace {

PhysicalParams detuned() {
    PhysicalParams p = PhysicalParams::lambda_defaults();
    p.deltaL2 = 2.0 * p.Gamma();
    return p;
}

void BM_SteadyStateSolve(benchmark::State& state) {
    const PhysicalParams p = detuned();
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_steady_state(p));
    }
}
BENCHMARK(BM_SteadyStateSolve);

void BM_LinearModelBuild(benchmark::State& state) {
    const PhysicalParams p = detuned();
    const SteadyState ss = solve_steady_state(p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_linear_model(p, ss));
    }
}
BENCHMARK(BM_LinearModelBuild);

void BM_SpectrumPoint(benchmark::State& state) {
    const PhysicalParams p = detuned();
    const LinearModel m = build_linear_model(p);
    double w = p.Omega_analysis;
    for (auto _ : state) {
        benchmark::DoNotOptimize(output_quadrature_covariance(m, w));
    }
}
BENCHMARK(BM_SpectrumPoint);

// One short trajectory through the exact-kernel simulator; the per-bin cost
// dominates, so this tracks the oracle's step rate.
void BM_OracleSegment(benchmark::State& state) {
    const PhysicalParams p = PhysicalParams::lambda_defaults();
    const LinearModel m = build_linear_model(p);
    OracleOptions opt;
    opt.trajectories = 1;
    opt.segments_per_trajectory = 1;
    opt.cycles_per_segment = 4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_quadrature_covariance(m, p.Omega_analysis, opt));
        opt.seed += 1;
    }
}
BENCHMARK(BM_OracleSegment);

void BM_SweepPoint(benchmark::State& state) {
    SweepConfig cfg;
    cfg.variable = SweepVariable::kProbeDetuning;
    cfg.sweep_min = cfg.sweep_max = 2.0 * cfg.base.Gamma();
    cfg.sweep_points = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep(cfg));
    }
}
BENCHMARK(BM_SweepPoint);

}  // namespace

BENCHMARK_MAIN();
