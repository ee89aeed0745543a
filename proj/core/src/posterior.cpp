#include "tca/posterior.hpp"

#include <algorithm>
#include <cmath>

#include "tca/error.hpp"
#include "tca/model.hpp"

namespace tca {

std::vector<double> PosteriorSamples::column(std::size_t c) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = draws[r * cols() + c];
    return out;
}

std::optional<std::size_t> PosteriorSamples::index_of(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

void PosteriorSamples::summarize() {
    const std::size_t n = rows();
    summary.assign(cols(), CoefficientSummary{});
    if (n == 0) return;
    for (std::size_t c = 0; c < cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += draws[r * cols() + c];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = draws[r * cols() + c] - mean;
            ss += d * d;
        }
        summary[c] = {mean, n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0};
    }
}

std::string algo_column(std::string_view name, std::string_view algo_id) {
    return std::string(name) + "[" + std::string(algo_id) + "]";
}

PosteriorSamples extract_algorithm(const PosteriorSamples& samples, std::string_view algo_id) {
    if (!samples.hierarchical()) return samples;
    const auto it = std::find(samples.algo_ids.begin(), samples.algo_ids.end(), algo_id);
    if (it == samples.algo_ids.end())
        throw Error(ErrorCode::InvalidInput, "posterior has no algorithm '" + std::string(algo_id) + "'");

    const std::vector<std::string> base = coefficient_names(samples.kind);
    std::vector<std::size_t> source(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        const std::string col = is_pooled(coefficient_group(samples.kind, i)) ? base[i] : algo_column(base[i], algo_id);
        const auto idx = samples.index_of(col);
        if (!idx) throw Error(ErrorCode::SpecMismatch, "posterior is missing column " + col);
        source[i] = *idx;
    }

    PosteriorSamples out;
    out.kind = samples.kind;
    out.names = base;
    out.n_chains = samples.n_chains;
    out.chain = samples.chain;
    out.acceptance_rate = samples.acceptance_rate;
    out.draws.resize(samples.rows() * base.size());
    for (std::size_t r = 0; r < samples.rows(); ++r)
        for (std::size_t i = 0; i < base.size(); ++i)
            out.draws[r * base.size() + i] = samples.draws[r * samples.cols() + source[i]];
    if (samples.rhat.size() == samples.cols()) {
        for (std::size_t i = 0; i < base.size(); ++i) {
            out.rhat.push_back(samples.rhat[source[i]]);
            if (samples.ess.size() == samples.cols()) out.ess.push_back(samples.ess[source[i]]);
        }
    }
    out.summarize();
    return out;
}

}  // namespace tca
