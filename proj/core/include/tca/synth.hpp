#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tca/model.hpp"
#include "tca/posterior.hpp"
#include "tca/types.hpp"

namespace tca::synth {

struct LogUniformRange {
    double lo = 1.0;
    double hi = 1.0;
};

struct CovariateRanges {
    LogUniformRange x1{0.001, 0.2};
    LogUniformRange x2{1.0, 40.0};
    LogUniformRange x3{10.0, 80.0};
    LogUniformRange x4{2.0, 50.0};
};

struct AlgoTruth {
    std::string algo_id;
    CoefficientVector truth;
    std::size_t n = 0;
};

struct SynthConfig {
    BenchmarkKind kind = BenchmarkKind::IS;
    std::vector<AlgoTruth> algos;
    CovariateRanges ranges;
    std::uint64_t seed = 0;
};

/// Posterior means of the US generic model, used as realistic ground truth.
CoefficientVector reference_truth(BenchmarkKind kind);

/// One algorithm ("ALGO") with the reference truth and n rows.
SynthConfig default_config(BenchmarkKind kind, std::size_t n, std::uint64_t seed);

// Throws Error(ConfigError) for ranges that are empty, non-positive or
// outside the default filter bounds on x1/x2, and for truth vectors of the
// wrong shape.
void validate(const SynthConfig& config);

/// Draws covariates log-uniformly, maps them through the link functions and
/// samples y from the resulting ALD. Each algorithm uses its own sub-seed, so
/// adding an algorithm leaves the others' rows unchanged.
std::vector<BenchmarkObservation> generate(const SynthConfig& config);

struct RecoveryEntry {
    std::string name;
    double truth = 0.0;
    double posterior_mean = 0.0;
    double posterior_std = 0.0;
    double bias = 0.0;        // posterior mean - truth
    double z_distance = 0.0;  // bias / posterior std
    bool covered = false;     // truth inside the central 95% interval
};

/// Compares a generic-layout posterior with the truth that generated its data.
std::vector<RecoveryEntry> recovery_report(const CoefficientVector& truth, const PosteriorSamples& fitted);

}  // namespace tca::synth
