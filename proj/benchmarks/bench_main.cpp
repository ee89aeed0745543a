#include <benchmark/benchmark.h>

#include <vector>

#include "tca/ald.hpp"
#include "tca/benchmark_engine.hpp"
#include "tca/model.hpp"
#include "tca/sampler.hpp"
#include "tca/synth.hpp"

namespace {

void BM_AldLogPdf(benchmark::State& state) {
    const tca::ald::Params p{-5.0, 30.0, 1.2};
    double y = -40.0, acc = 0.0;
    for (auto _ : state) {
        acc += tca::ald::log_pdf(p, y);
        y += 0.001;
        if (y > 40.0) y = -40.0;
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_AldLogPdf);

void BM_LogPosterior(benchmark::State& state) {
    const auto kind = tca::BenchmarkKind::IS;
    const auto obs = tca::synth::generate(tca::synth::default_config(kind, static_cast<std::size_t>(state.range(0)), 1));
    const auto truth = tca::synth::reference_truth(kind);
    const auto prior = tca::default_prior(kind);
    for (auto _ : state) benchmark::DoNotOptimize(tca::log_posterior(truth, obs, prior));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogPosterior)->Arg(1000)->Arg(20000);

void BM_MetropolisSweep(benchmark::State& state) {
    const auto kind = tca::BenchmarkKind::IS;
    const auto obs = tca::synth::generate(tca::synth::default_config(kind, static_cast<std::size_t>(state.range(0)), 2));
    tca::ModelSpec spec;
    spec.kind = kind;
    spec.prior = tca::default_prior(kind);
    tca::ChainConfig c;
    c.n_iter = 200;
    c.n_burn = 100;
    c.thinning = 1;
    c.n_chains = 2;
    for (auto _ : state) benchmark::DoNotOptimize(tca::run_mh(spec, obs, c));
    state.SetItemsProcessed(state.iterations() * c.n_iter * c.n_chains);
}
BENCHMARK(BM_MetropolisSweep)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ComputeBenchmarks(benchmark::State& state) {
    tca::ExecutionRecord r;
    r.arrival_price = 100.0;
    r.end_time = 600000;
    for (int i = 0; i < 20; ++i) r.fills.push_back({i * 30000, 100.0 + 0.01 * i, 10.0});
    r.size_shares = 200.0;
    r.adv_shares = 20000.0;
    r.participation_rate_pct = 10.0;
    r.volatility_pct = 25.0;
    r.spread_bps = 5.0;
    std::vector<tca::TapeTrade> tape;
    for (int i = 0; i < 2000; ++i) tape.push_back({i * 500, 100.0 + 0.001 * (i % 50), 5.0});
    for (auto _ : state) benchmark::DoNotOptimize(tca::compute_benchmarks(r, tape));
}
BENCHMARK(BM_ComputeBenchmarks);

}  // namespace
BENCHMARK_MAIN();
