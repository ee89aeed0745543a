#pragma once

#include <span>
#include <vector>

namespace tca::diagnostics {

// Each inner vector is one chain of equal length.
using Chains = std::vector<std::vector<double>>;

/// Classic potential scale reduction on the chains as given.
double rhat(const Chains& chains);

/// Split each chain in half (dropping a middle draw when odd).
Chains split(const Chains& chains);

/// Rank-normalized split-R-hat: max of the bulk (rank-normalized draws) and
/// tail (rank-normalized distance from the median) versions. 1.0 for constant
/// input.
double rank_normalized_split_rhat(const Chains& chains);

/// Multi-chain effective sample size on split chains; the autocorrelation sum
/// stops at the first negative pair of consecutive lags.
double effective_sample_size(const Chains& chains);

/// Ranks with ties averaged, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace tca::diagnostics
