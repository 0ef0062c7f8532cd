#include <benchmark/benchmark.h>

#include "mfharvest/meanfield.hpp"
#include "mfharvest/simulation.hpp"

using namespace mfharvest;

namespace {

const Diffusion& logistic() {
    static const Diffusion m = Diffusion::logistic({-1.0, 0.5, 1.0}, 1.0);
    return m;
}

}  // namespace

static void BM_XiSeries(benchmark::State& state) {
    HittingTimes ht(logistic());
    double y = 5.0;
    for (auto _ : state) benchmark::DoNotOptimize(ht.xi_series(y));
}
BENCHMARK(BM_XiSeries);

static void BM_XiQuadrature(benchmark::State& state) {
    HittingTimes ht(logistic());
    for (auto _ : state) benchmark::DoNotOptimize(ht.xi_quadrature(5.0));
}
BENCHMARK(BM_XiQuadrature);

static void BM_XiGeneric(benchmark::State& state) {
    HittingTimes ht(logistic().generic());
    for (auto _ : state) benchmark::DoNotOptimize(ht.xi(5.0));
}
BENCHMARK(BM_XiGeneric);

static void BM_GenericModelSetup(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(HittingTimes(logistic().generic()));
}
BENCHMARK(BM_GenericModelSetup)->Unit(benchmark::kMicrosecond);

static void BM_BestResponse(benchmark::State& state) {
    HittingTimes ht(logistic());
    for (auto _ : state) benchmark::DoNotOptimize(best_response(ht, 1.0, 0.8));
}
BENCHMARK(BM_BestResponse)->Unit(benchmark::kMicrosecond);

static void BM_ExpectedStock(benchmark::State& state) {
    Stationary st{HittingTimes(logistic())};
    for (auto _ : state) benchmark::DoNotOptimize(st.expected_stock(4.0));
}
BENCHMARK(BM_ExpectedStock)->Unit(benchmark::kMicrosecond);

static void BM_EquilibriumHarvestRate(benchmark::State& state) {
    MeanFieldProblem p(logistic(), PayoffSpec::from_expression(1.0, "1/(z+1)", Interaction::HarvestRate));
    for (auto _ : state) benchmark::DoNotOptimize(p.mfg_equilibrium());
}
BENCHMARK(BM_EquilibriumHarvestRate)->Unit(benchmark::kMillisecond);

static void BM_EquilibriumExpectedStock(benchmark::State& state) {
    MeanFieldProblem p(logistic(),
                       PayoffSpec::from_expression(1.0, "1/(1+exp(10*(z-1.9)))", Interaction::ExpectedStock));
    for (auto _ : state) benchmark::DoNotOptimize(p.mfg_equilibrium());
}
BENCHMARK(BM_EquilibriumExpectedStock)->Unit(benchmark::kMillisecond);

static void BM_ControlOptimum(benchmark::State& state) {
    MeanFieldProblem p(logistic(), PayoffSpec::from_expression(1.0, "1/(z+1)", Interaction::HarvestRate));
    for (auto _ : state) benchmark::DoNotOptimize(p.mfc_optimum());
}
BENCHMARK(BM_ControlOptimum)->Unit(benchmark::kMillisecond);

static void BM_SimulationSteps(benchmark::State& state) {
    SimConfig cfg;
    cfg.threads = 1;
    const double horizon = static_cast<double>(state.range(0)) * cfg.dt;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_path(logistic(), 5.13, horizon, cfg, 1000));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulationSteps)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
