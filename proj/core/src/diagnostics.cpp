#include "tca/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "tca/error.hpp"

namespace tca::diagnostics {

namespace {

void check_chains(const Chains& chains) {
    if (chains.empty() || chains.front().size() < 2)
        throw Error(ErrorCode::InvalidInput, "diagnostics need at least one chain with two draws");
    for (const auto& c : chains)
        if (c.size() != chains.front().size())
            throw Error(ErrorCode::InvalidInput, "diagnostics need chains of equal length");
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Rebuilds the chain shape from a pooled vector.
Chains reshape(std::span<const double> pooled, std::size_t m, std::size_t n) {
    Chains out(m);
    for (std::size_t c = 0; c < m; ++c) out[c].assign(pooled.begin() + c * n, pooled.begin() + (c + 1) * n);
    return out;
}

Chains rank_normalize(const Chains& chains) {
    const std::size_t m = chains.size(), n = chains.front().size();
    std::vector<double> pooled;
    pooled.reserve(m * n);
    for (const auto& c : chains) pooled.insert(pooled.end(), c.begin(), c.end());
    const std::vector<double> ranks = average_ranks(pooled);
    const boost::math::normal standard;
    const double total = static_cast<double>(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i)
        pooled[i] = boost::math::quantile(standard, (ranks[i] - 0.375) / (total + 0.25));
    return reshape(pooled, m, n);
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double rhat(const Chains& chains) {
    check_chains(chains);
    const std::size_t m = chains.size();
    const double n = static_cast<double>(chains.front().size());
    std::vector<double> means(m), vars(m);
    for (std::size_t c = 0; c < m; ++c) {
        means[c] = mean_of(chains[c]);
        double ss = 0.0;
        for (double v : chains[c]) ss += (v - means[c]) * (v - means[c]);
        vars[c] = ss / (n - 1.0);
    }
    const double w = mean_of(vars);
    const double grand = mean_of(means);
    double b = 0.0;
    if (m > 1) {
        for (double mu : means) b += (mu - grand) * (mu - grand);
        b *= n / static_cast<double>(m - 1);
    }
    if (!(w > 0.0)) return 1.0;
    const double var_plus = (n - 1.0) / n * w + b / n;
    return std::sqrt(var_plus / w);
}

Chains split(const Chains& chains) {
    check_chains(chains);
    const std::size_t n = chains.front().size();
    const std::size_t half = n / 2;
    Chains out;
    out.reserve(chains.size() * 2);
    for (const auto& c : chains) {
        out.emplace_back(c.begin(), c.begin() + half);
        out.emplace_back(c.end() - half, c.end());
    }
    return out;
}

double rank_normalized_split_rhat(const Chains& chains) {
    const Chains halves = split(chains);
    const double bulk = rhat(rank_normalize(halves));

    std::vector<double> pooled;
    for (const auto& c : halves) pooled.insert(pooled.end(), c.begin(), c.end());
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    Chains folded = halves;
    for (auto& c : folded)
        for (double& v : c) v = std::abs(v - median);
    const double tail = rhat(rank_normalize(folded));
    return std::max(bulk, tail);
}

double effective_sample_size(const Chains& input) {
    const Chains chains = split(input);
    const std::size_t m = chains.size();
    const std::size_t n = chains.front().size();
    if (n < 4) return static_cast<double>(m * n);
    const double nd = static_cast<double>(n);

    std::vector<double> means(m), vars(m);
    for (std::size_t c = 0; c < m; ++c) {
        means[c] = mean_of(chains[c]);
        double ss = 0.0;
        for (double v : chains[c]) ss += (v - means[c]) * (v - means[c]);
        vars[c] = ss / (nd - 1.0);
    }
    const double w = mean_of(vars);
    double var_plus = w * (nd - 1.0) / nd;
    if (m > 1) {
        const double grand = mean_of(means);
        double b = 0.0;
        for (double mu : means) b += (mu - grand) * (mu - grand);
        var_plus += b / static_cast<double>(m - 1);
    }
    if (!(var_plus > 0.0)) return static_cast<double>(m * n);

    // Biased per-chain autocovariance averaged over chains.
    auto mean_acov = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            double s = 0.0;
            const auto& x = chains[c];
            for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - means[c]) * (x[i + lag] - means[c]);
            acc += s / nd;
        }
        return acc / static_cast<double>(m);
    };
    auto rho = [&](std::size_t lag) { return 1.0 - (w - mean_acov(lag)) / var_plus; };

    double tau = -1.0;
    for (std::size_t t = 0; t + 1 < n; t += 2) {
        const double pair = (t == 0 ? 1.0 : rho(t)) + rho(t + 1);
        if (pair < 0.0) break;
        tau += 2.0 * pair;
    }
    tau = std::max(tau, 1.0 / std::log10(static_cast<double>(m * n)));
    return static_cast<double>(m * n) / tau;
}

}  // namespace tca::diagnostics
