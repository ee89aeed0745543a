#pragma once

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tca/ald.hpp"
#include "tca/posterior.hpp"
#include "tca/types.hpp"

namespace tca {

// Flat coefficient order is fixed: beta0..beta4, gamma0..gamma4 (gamma5,
// gamma6 for PWP20 only), alpha0..alpha2.
inline constexpr std::size_t kBetaCount = 5;
inline constexpr std::size_t kAlphaCount = 3;

std::size_t gamma_count(BenchmarkKind kind);
std::size_t coefficient_count(BenchmarkKind kind);
std::vector<std::string> coefficient_names(BenchmarkKind kind);

enum class CoefficientGroup { Location, Scale, Skew };

CoefficientGroup coefficient_group(BenchmarkKind kind, std::size_t flat_index);

// Scale coefficients are shared across algorithms in the hierarchical model;
// location and skew are per algorithm.
inline bool is_pooled(CoefficientGroup g) { return g == CoefficientGroup::Scale; }

struct CoefficientVector {
    std::array<double, kBetaCount> beta{};
    std::vector<double> gamma;  // 5, or 7 for PWP20 (gamma6 > 0)
    std::array<double, kAlphaCount> alpha{};

    static CoefficientVector zeros(BenchmarkKind kind);
    static CoefficientVector from_flat(BenchmarkKind kind, std::span<const double> flat);
    std::vector<double> flat() const;
};

// Link functions for one covariate row:
//   mu    = -exp(beta0 + sum beta_i ln x_i)
//   sigma =  exp(gamma0 + sum gamma_i ln x_i [+ gamma5 ln(|x2 - 20| + gamma6)])
//   r     =  exp(alpha0 + alpha1 ln x1 + alpha2 ln x2),  kappa = kappa_from_r(r)
// Throws Error(InvalidCovariate) for non-positive covariates.
ald::Params link(const CoefficientVector& coeffs, const Covariates& x, BenchmarkKind kind);
ald::Params link(std::span<const double> flat, const Covariates& x, BenchmarkKind kind);

struct NormalPrior {
    double mean = 0.0;
    double std = 1.0;
    bool truncated_at_zero = false;
};

struct PriorSpec {
    BenchmarkKind kind = BenchmarkKind::IS;
    std::vector<NormalPrior> terms;  // flat coefficient order
};

/// Weakly-informative defaults for the generic model.
PriorSpec default_prior(BenchmarkKind kind);

// Throws Error(SpecMismatch) if the prior does not fit the kind's layout or
// violates its invariants (std > 0, truncation only on gamma6).
void validate(const PriorSpec& prior);

std::vector<double> prior_means(const PriorSpec& prior);

double log_normal_prior(const NormalPrior& term, double value);

double log_prior(std::span<const double> flat, const PriorSpec& prior);
double log_prior(const CoefficientVector& coeffs, const PriorSpec& prior);

double log_likelihood(std::span<const double> flat, std::span<const BenchmarkObservation> observations,
                      BenchmarkKind kind);

/// Unnormalized log posterior of the pooled model. Observations must all be
/// of the prior's benchmark kind.
double log_posterior(const CoefficientVector& coeffs, std::span<const BenchmarkObservation> observations,
                     const PriorSpec& prior);

/// Turns a stage-1 (generic) posterior into the stage-2 prior: one normal per
/// coefficient with the stage-1 marginal mean and std (std floored at
/// kMinPriorStd). Requires >= 100 retained draws.
inline constexpr double kMinPriorStd = 1e-6;
inline constexpr std::size_t kMinStageOneDraws = 100;
PriorSpec hierarchical_prior_from_posterior(const PosteriorSamples& stage1);

struct Pooled {};
struct PerAlgo {
    std::vector<std::string> algo_ids;
};

struct ModelSpec {
    BenchmarkKind kind = BenchmarkKind::IS;
    PriorSpec prior;
    std::variant<Pooled, PerAlgo> pooling = Pooled{};
};

// Stage-2 layout: shared gamma first, then beta and alpha per algorithm in
// algo_ids order. Column names follow PosteriorSamples conventions.
std::vector<std::string> hierarchical_names(BenchmarkKind kind, std::span<const std::string> algo_ids);

/// Generic-layout flat coefficients of one algorithm from a stage-2 state.
std::vector<double> algorithm_coefficients(BenchmarkKind kind, std::span<const double> hierarchical_state,
                                           std::size_t algo_index);

/// Log posterior of the partially pooled model: the scale prior counted once,
/// location/skew priors once per algorithm, likelihood over every algorithm's
/// observations (grouped in algo_ids order).
double log_posterior_hierarchical(std::span<const double> hierarchical_state,
                                  std::span<const std::vector<BenchmarkObservation>> grouped,
                                  const PriorSpec& prior);

}  // namespace tca
