#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tca/posterior.hpp"
#include "tca/rng.hpp"
#include "tca/types.hpp"

namespace tca {

struct CostSummary {
    double mean = 0.0;
    double std = 0.0;
    double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
};

// Posterior of the expected benchmark value E[y] at one covariate point: one
// value per retained draw.
struct CostPosterior {
    std::vector<double> values;
    CostSummary summary;
};

/// Linear interpolation between order statistics; `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double p);

CostSummary summarize_costs(std::span<const double> values);

/// E[y] = mu + sigma (1/kappa - kappa) evaluated per draw. Needs a
/// generic-layout posterior (see extract_algorithm).
CostPosterior cost_posterior(const PosteriorSamples& samples, const Covariates& x);

/// Convenience: picks the algorithm's coefficients out of a per-algorithm fit
/// first; generic fits ignore algo_id.
CostPosterior cost_posterior(const PosteriorSamples& samples, const Covariates& x, std::string_view algo_id);

/// One posterior realization drawn uniformly from the stored values.
double sample_cost(const CostPosterior& cost, Rng& rng);
double sample_cost(const CostPosterior& cost, std::uint64_t seed);

struct Histogram {
    double lo = 0.0;
    double bin_width = 0.0;
    std::vector<std::size_t> counts;
};

/// Freedman-Diaconis bins (width 2 IQR n^(-1/3)); falls back to Sturges'
/// bin count when the IQR is zero and to one unit-width bin for constant data.
Histogram freedman_diaconis_histogram(std::span<const double> values);

}  // namespace tca
