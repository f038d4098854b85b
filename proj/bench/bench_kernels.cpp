#include <benchmark/benchmark.h>

#include "bubbledate/asymptotics.hpp"
#include "bubbledate/dgp.hpp"
#include "bubbledate/estimator.hpp"
#include "bubbledate/montecarlo.hpp"

using namespace bubbledate;

namespace {

Execution exec_of(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_ArgminBreak(benchmark::State& state) {
    DgpConfig c;
    c.T = static_cast<std::size_t>(state.range(1));
    c.drift0_override = c.drift1_override = 1.0 / 800;
    if (c.T > 800) {
        c.phi_a = 1.0001;
        c.phi_b = 0.9999;
    }
    const auto moments = PrefixMoments::build(simulate(c, ErrorSpec{}, 1));
    const auto trim = TrimmingPolicy{};
    for (auto _ : state) {
        auto scan = argmin_break(moments, trim.margin(c.T), trim.upper(c.T), exec_of(state));
        benchmark::DoNotOptimize(scan.k_hat);
    }
    label(state);
}
BENCHMARK(BM_ArgminBreak)->ArgsProduct({{0, 1}, {800, 100000}});

void BM_RunExperiment(benchmark::State& state) {
    auto cfg = preset(Preset::Baseline);
    cfg.reps = 100;
    for (auto _ : state) {
        auto r = run_experiment(cfg, exec_of(state));
        benchmark::DoNotOptimize(r.histograms.data());
    }
    label(state);
}
BENCHMARK(BM_RunExperiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RecoveryLimit(benchmark::State& state) {
    Discretization d;
    d.paths = 200;
    for (auto _ : state) {
        auto s = sample_recovery_limits(1.0, std::nullopt, d, 7, exec_of(state));
        benchmark::DoNotOptimize(s.draws.data());
    }
    label(state);
}
BENCHMARK(BM_RecoveryLimit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EmergenceLimit(benchmark::State& state) {
    Discretization d;
    d.paths = 200;
    for (auto _ : state) {
        auto s = sample_emergence_limits(0.4, d, 7, exec_of(state));
        benchmark::DoNotOptimize(s.draws.data());
    }
    label(state);
}
BENCHMARK(BM_EmergenceLimit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
