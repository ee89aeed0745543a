#include "tca/cost_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tca/ald.hpp"
#include "tca/error.hpp"
#include "tca/model.hpp"

namespace tca {

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw Error(ErrorCode::InvalidInput, "quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidInput, "quantile level must lie in [0, 1]");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

CostSummary summarize_costs(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidInput, "cannot summarize an empty cost posterior");
    const double n = static_cast<double>(values.size());
    CostSummary s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.q05 = quantile_sorted(sorted, 0.05);
    s.q25 = quantile_sorted(sorted, 0.25);
    s.q50 = quantile_sorted(sorted, 0.50);
    s.q75 = quantile_sorted(sorted, 0.75);
    s.q95 = quantile_sorted(sorted, 0.95);
    return s;
}

CostPosterior cost_posterior(const PosteriorSamples& samples, const Covariates& x) {
    if (samples.hierarchical())
        throw Error(ErrorCode::SpecMismatch, "cost posterior needs one algorithm's coefficients");
    if (samples.rows() == 0) throw Error(ErrorCode::InvalidInput, "posterior has no draws");
    CostPosterior cost;
    cost.values.reserve(samples.rows());
    for (std::size_t r = 0; r < samples.rows(); ++r)
        cost.values.push_back(ald::mean(link(samples.row(r), x, samples.kind)));
    cost.summary = summarize_costs(cost.values);
    return cost;
}

CostPosterior cost_posterior(const PosteriorSamples& samples, const Covariates& x, std::string_view algo_id) {
    if (!samples.hierarchical()) return cost_posterior(samples, x);
    return cost_posterior(extract_algorithm(samples, algo_id), x);
}

double sample_cost(const CostPosterior& cost, Rng& rng) {
    if (cost.values.empty()) throw Error(ErrorCode::InvalidInput, "cannot sample an empty cost posterior");
    std::uniform_int_distribution<std::size_t> pick(0, cost.values.size() - 1);
    return cost.values[pick(rng)];
}

double sample_cost(const CostPosterior& cost, std::uint64_t seed) {
    Rng rng(seed);
    return sample_cost(cost, rng);
}

Histogram freedman_diaconis_histogram(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidInput, "histogram of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front(), hi = sorted.back();
    const double n = static_cast<double>(sorted.size());

    Histogram h;
    h.lo = lo;
    if (!(hi > lo)) {
        h.bin_width = 1.0;
        h.counts = {sorted.size()};
        return h;
    }
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    std::size_t bins;
    if (iqr > 0.0) {
        const double width = 2.0 * iqr / std::cbrt(n);
        bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    } else {
        bins = static_cast<std::size_t>(std::ceil(std::log2(n) + 1.0));
    }
    bins = std::clamp<std::size_t>(bins, 1, 10000);
    h.bin_width = (hi - lo) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double v : sorted) {
        auto idx = static_cast<std::size_t>((v - lo) / h.bin_width);
        h.counts[std::min(idx, bins - 1)] += 1;
    }
    return h;
}

}  // namespace tca
