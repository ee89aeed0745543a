#include "tca/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tca/ald.hpp"
#include "tca/cost_estimator.hpp"
#include "tca/error.hpp"
#include "tca/rng.hpp"

namespace tca::synth {

namespace {

double draw_log_uniform(const LogUniformRange& r, Rng& rng) {
    const double lo = std::log(r.lo), hi = std::log(r.hi);
    return std::exp(lo + (hi - lo) * uniform01(rng));
}

void check_range(const LogUniformRange& r, const char* name) {
    if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi))
        throw Error(ErrorCode::ConfigError, std::string("invalid covariate range for ") + name);
}

}  // namespace

CoefficientVector reference_truth(BenchmarkKind kind) {
    CoefficientVector c;
    switch (kind) {
        case BenchmarkKind::IS:
            c.beta = {0.89, 0.46, 0.09, 0.83, 0.16};
            c.gamma = {3.76, 0.43, -0.45, 0.64, 0.2};
            c.alpha = {-3.4, -0.22, 0.49};
            break;
        case BenchmarkKind::VWAP:
            c.beta = {-1.12, 0.08, 0.0, 0.01, 0.85};
            c.gamma = {0.84, 0.18, -0.33, 0.43, 0.36};
            c.alpha = {-5.1, -0.46, 0.13};
            break;
        case BenchmarkKind::PWP20:
            c.beta = {-0.02, 0.14, -0.32, 0.13, 0.72};
            c.gamma = {-0.2, 0.33, -0.5, 0.63, 0.19, 1.04, 5.91};
            c.alpha = {-3.45, -0.28, 0.24};
            break;
        case BenchmarkKind::Rev5m:
            c.beta = {-2.93, -0.09, 0.47, 0.17, 0.71};
            c.gamma = {-0.45, -0.02, 0.07, 0.53, 0.24};
            c.alpha = {-1.73, 0.0, 0.24};
            break;
    }
    return c;
}

SynthConfig default_config(BenchmarkKind kind, std::size_t n, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.kind = kind;
    cfg.seed = seed;
    cfg.algos.push_back({"ALGO", reference_truth(kind), n});
    return cfg;
}

void validate(const SynthConfig& config) {
    check_range(config.ranges.x1, "x1");
    check_range(config.ranges.x2, "x2");
    check_range(config.ranges.x3, "x3");
    check_range(config.ranges.x4, "x4");
    if (config.ranges.x1.lo < 0.001 || config.ranges.x1.hi > 0.2 || config.ranges.x2.lo < 1.0 ||
        config.ranges.x2.hi > 40.0)
        throw Error(ErrorCode::ConfigError, "synthetic order covariates must stay inside the filter bounds");
    for (const AlgoTruth& a : config.algos) {
        if (a.truth.gamma.size() != gamma_count(config.kind))
            throw Error(ErrorCode::ConfigError, "truth for '" + a.algo_id + "' does not match the benchmark kind");
        if (config.kind == BenchmarkKind::PWP20 && !(a.truth.gamma[6] > 0.0))
            throw Error(ErrorCode::ConfigError, "gamma6 must be positive");
    }
}

std::vector<BenchmarkObservation> generate(const SynthConfig& config) {
    validate(config);
    std::vector<BenchmarkObservation> rows;
    for (std::size_t a = 0; a < config.algos.size(); ++a) {
        const AlgoTruth& algo = config.algos[a];
        Rng rng(derive_seed(config.seed, "synth:" + algo.algo_id));
        const std::vector<double> flat = algo.truth.flat();
        for (std::size_t i = 0; i < algo.n; ++i) {
            BenchmarkObservation o;
            o.kind = config.kind;
            o.algo_id = algo.algo_id;
            o.x.x1 = draw_log_uniform(config.ranges.x1, rng);
            o.x.x2 = draw_log_uniform(config.ranges.x2, rng);
            o.x.x3 = draw_log_uniform(config.ranges.x3, rng);
            o.x.x4 = draw_log_uniform(config.ranges.x4, rng);
            o.y = ald::draw(link(flat, o.x, config.kind), rng);
            rows.push_back(std::move(o));
        }
    }
    return rows;
}

std::vector<RecoveryEntry> recovery_report(const CoefficientVector& truth, const PosteriorSamples& fitted) {
    if (fitted.hierarchical())
        throw Error(ErrorCode::SpecMismatch, "recovery report needs a generic-layout posterior");
    const std::vector<double> t = truth.flat();
    if (t.size() != fitted.cols()) throw Error(ErrorCode::SpecMismatch, "truth and posterior shapes differ");
    if (fitted.rows() == 0) throw Error(ErrorCode::InvalidInput, "posterior has no draws");

    std::vector<RecoveryEntry> out;
    for (std::size_t c = 0; c < t.size(); ++c) {
        std::vector<double> col = fitted.column(c);
        const CostSummary s = summarize_costs(col);
        std::sort(col.begin(), col.end());
        RecoveryEntry e;
        e.name = fitted.names[c];
        e.truth = t[c];
        e.posterior_mean = s.mean;
        e.posterior_std = s.std;
        e.bias = s.mean - t[c];
        if (s.std > 0.0)
            e.z_distance = e.bias / s.std;
        else
            e.z_distance = e.bias == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), e.bias);
        e.covered = t[c] >= quantile_sorted(col, 0.025) && t[c] <= quantile_sorted(col, 0.975);
        out.push_back(e);
    }
    return out;
}

}  // namespace tca::synth
