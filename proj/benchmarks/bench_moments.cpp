#include "hawkespop/bivariate_blocks.hpp"
#include "hawkespop/fd_moments.hpp"
#include "hawkespop/model_config.hpp"
#include "hawkespop/moment_engine.hpp"
#include "hawkespop/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace hawkespop;

namespace {

const HawkesModel &model(const char *name) {
    static const HawkesModel bi =
        *load_model_config(std::string(HAWKESPOP_CONFIG_DIR) + "/bivariate.json").model;
    static const HawkesModel tri =
        *load_model_config(std::string(HAWKESPOP_CONFIG_DIR) + "/trivariate.json").model;
    return std::string_view(name) == "bivariate" ? bi : tri;
}

void BM_Assemble(benchmark::State &st) {
    const auto &m = model("bivariate");
    const int n = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(assemble_system(m, n));
}

void BM_Transient(benchmark::State &st, TransientMethod method) {
    const MomentSystem sys = assemble_system(model("bivariate"), static_cast<int>(st.range(0)));
    const double t = static_cast<double>(st.range(1));
    for (auto _ : st)
        benchmark::DoNotOptimize(transient_moments(sys, t, method));
}

void BM_Stationary(benchmark::State &st) {
    const MomentSystem sys = assemble_system(model("bivariate"), static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(stationary_moments(sys));
}

void BM_RecursiveBlocks(benchmark::State &st) {
    const auto &m = model("bivariate");
    const int n = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(psi_recursive_transient(m, n, 5.0));
}

void BM_FiniteDifference(benchmark::State &st) {
    const auto &m = model("trivariate");
    FdSpec spec;
    spec.h = 1e-3;
    spec.max_order = static_cast<int>(st.range(0));
    spec.estimate_error = false;
    for (auto _ : st)
        benchmark::DoNotOptimize(fd_moment_table(m, 5.0, spec.max_order, spec));
}

void BM_MonteCarlo(benchmark::State &st) {
    const auto &m = model("bivariate");
    const auto reps = static_cast<std::size_t>(st.range(0));
    std::uint64_t seed = 1;
    for (auto _ : st)
        benchmark::DoNotOptimize(estimate_moments(m, 5.0, 2, reps, seed++, 1));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * reps));
}

} // namespace

BENCHMARK(BM_Assemble)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Transient, closed_form, TransientMethod::closed_form)
    ->Args({3, 5})->Args({3, 500})->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Transient, ode, TransientMethod::ode)
    ->Args({3, 5})->Args({3, 500})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Stationary)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RecursiveBlocks)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FiniteDifference)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
