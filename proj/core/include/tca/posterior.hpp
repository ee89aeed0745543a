#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tca/types.hpp"

namespace tca {

struct CoefficientSummary {
    double mean = 0.0;
    double std = 0.0;
};

// Retained MCMC draws, row-major (one row per retained draw, one column per
// coefficient), together with chain diagnostics. Generic fits use the flat
// coefficient names (beta0..beta4, gamma0..gamma4[..6], alpha0..alpha2).
// Per-algorithm fits share the gamma columns and suffix per-algorithm beta and
// alpha columns with "[algo_id]".
struct PosteriorSamples {
    BenchmarkKind kind = BenchmarkKind::IS;
    std::vector<std::string> algo_ids;  // empty for a generic (pooled) fit
    std::vector<std::string> names;
    std::size_t n_chains = 0;
    std::vector<int> chain;     // chain id per row
    std::vector<double> draws;  // rows() * cols()
    double acceptance_rate = 0.0;
    std::vector<double> rhat;
    std::vector<double> ess;
    std::vector<CoefficientSummary> summary;
    // Per chain, the marginal proposal std of each coefficient during the
    // retained phase. Empty when the samples were read back from disk.
    std::vector<std::vector<double>> proposal_std;

    std::size_t cols() const { return names.size(); }
    std::size_t rows() const { return names.empty() ? 0 : draws.size() / names.size(); }
    bool hierarchical() const { return !algo_ids.empty(); }

    std::span<const double> row(std::size_t r) const { return {draws.data() + r * cols(), cols()}; }
    std::vector<double> column(std::size_t c) const;
    std::optional<std::size_t> index_of(std::string_view name) const;

    // Recomputes summary (mean, sample std) from draws.
    void summarize();
};

/// Draws of one algorithm's coefficients in the generic column layout. A
/// generic fit applies to every algorithm and is returned unchanged. Throws
/// Error(InvalidInput) for an algorithm the fit does not know.
PosteriorSamples extract_algorithm(const PosteriorSamples& samples, std::string_view algo_id);

std::string algo_column(std::string_view name, std::string_view algo_id);

}  // namespace tca
