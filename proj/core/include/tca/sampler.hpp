#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tca/model.hpp"
#include "tca/posterior.hpp"

namespace tca {

struct ChainConfig {
    std::size_t n_iter = 20000;
    std::size_t n_burn = 10000;
    std::size_t thinning = 5;
    std::size_t n_chains = 4;
    // Per-coefficient proposal std; empty means the problem's defaults.
    std::vector<double> step_scales;
    std::uint64_t seed = 0;
    bool adapt_during_burn = true;

    /// Default run length for desk use and the test suite.
    static ChainConfig desk();
    /// The long Metropolis-Hastings run of the reference calibration
    /// (500k iterations, 400k burn-in, thinning 20).
    static ChainConfig long_run();

    std::size_t retained_per_chain() const { return (n_iter - n_burn) / thinning; }
};

// Throws Error(ConfigError) when n_burn >= n_iter, thinning == 0,
// n_chains < 2 or a step scale is not positive.
void validate(const ChainConfig& config);

// Log density that can be updated one coordinate block at a time. The sampler
// owns one instance per chain, so implementations may cache freely.
class BlockTarget {
public:
    virtual ~BlockTarget() = default;

    /// Makes `state` current and returns its log density.
    virtual double reset(std::span<const double> state) = 0;

    /// Log density at `candidate`, which differs from the current state only
    /// inside `block`.
    virtual double propose(std::size_t block, std::span<const double> candidate) = 0;

    /// Commits the most recent proposal.
    virtual void accept() = 0;
};

struct SamplingProblem {
    std::vector<std::string> names;
    std::vector<double> initial;
    std::vector<std::vector<std::size_t>> blocks;
    std::vector<double> default_steps;
    std::function<std::unique_ptr<BlockTarget>()> make_target;
};

/// Wraps a plain log-density function (re-evaluated in full on every
/// proposal). Handy for test targets.
SamplingProblem function_problem(std::vector<std::string> names, std::vector<double> initial,
                                 std::vector<std::vector<std::size_t>> blocks, std::vector<double> default_steps,
                                 std::function<double(std::span<const double>)> log_density);

/// Block-wise Gaussian random-walk Metropolis-Hastings over independent
/// chains. During burn-in (if enabled) each block's proposal is tuned: its
/// scale by adapt_step every adaptation window, and its shape from the
/// empirical covariance of earlier burn-in draws. Everything is frozen for the
/// retained phase. Deterministic for a fixed config.seed.
PosteriorSamples run_mh(const SamplingProblem& problem, const ChainConfig& config);

/// Sampling problem for the ALD regression. Pooled specs sample the flat
/// coefficient vector in three blocks (location, scale, skew); PerAlgo specs
/// sample one shared scale block plus location and skew blocks per algorithm.
/// Chains start at the prior means.
SamplingProblem regression_problem(const ModelSpec& model, std::span<const BenchmarkObservation> observations);

PosteriorSamples run_mh(const ModelSpec& model, std::span<const BenchmarkObservation> observations,
                        const ChainConfig& config);

inline constexpr double kTargetAcceptLo = 0.2;
inline constexpr double kTargetAcceptHi = 0.4;
inline constexpr std::size_t kAdaptWindow = 50;

/// Multiplicative step update from one window's acceptance rate: unchanged
/// inside [0.2, 0.4], shrunk below, grown above.
double adapt_step(double acceptance_rate, double step);
std::vector<double> adapt_steps(std::span<const double> acceptance_rates, std::span<const double> steps);

/// Draws n_per_draw ALD samples for every (retained draw, covariate row);
/// output is ordered draw-major, then covariate row, then replicate.
std::vector<double> posterior_predictive(const PosteriorSamples& samples, std::span<const Covariates> x_list,
                                         std::size_t n_per_draw, std::uint64_t seed);

}  // namespace tca
