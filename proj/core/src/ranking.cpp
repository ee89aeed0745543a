#include "tca/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>

#include "tca/error.hpp"

namespace tca {

namespace {

Gaussian2 fit_gaussian(const std::vector<Eigen::Vector2d>& pts) {
    Gaussian2 g;
    g.count = pts.size();
    g.mean = Eigen::Vector2d::Zero();
    for (const auto& p : pts) g.mean += p;
    g.mean /= static_cast<double>(pts.size());
    g.cov = Eigen::Matrix2d::Zero();
    if (pts.size() > 1) {
        for (const auto& p : pts) g.cov += (p - g.mean) * (p - g.mean).transpose();
        g.cov /= static_cast<double>(pts.size() - 1);
    }
    g.cov(0, 0) = std::max(g.cov(0, 0), 0.0) + kProfileVarianceFloor;
    g.cov(1, 1) = std::max(g.cov(1, 1), 0.0) + kProfileVarianceFloor;
    return g;
}

struct Clustering {
    std::vector<Eigen::Vector2d> centers;
    std::vector<std::size_t> labels;
};

// Lloyd's algorithm from a deterministic farthest-first start.
Clustering kmeans(const std::vector<Eigen::Vector2d>& pts, std::size_t k) {
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : pts) centroid += p;
    centroid /= static_cast<double>(pts.size());

    Clustering c;
    std::size_t first = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if ((pts[i] - centroid).squaredNorm() < (pts[first] - centroid).squaredNorm()) first = i;
    c.centers.push_back(pts[first]);
    while (c.centers.size() < k) {
        std::size_t far = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& ctr : c.centers) d = std::min(d, (pts[i] - ctr).squaredNorm());
            if (d > best) {
                best = d;
                far = i;
            }
        }
        c.centers.push_back(pts[far]);
    }

    c.labels.assign(pts.size(), 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < k; ++j)
                if ((pts[i] - c.centers[j]).squaredNorm() < (pts[i] - c.centers[best]).squaredNorm()) best = j;
            changed = changed || best != c.labels[i];
            c.labels[i] = best;
        }
        std::vector<Eigen::Vector2d> sums(k, Eigen::Vector2d::Zero());
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            sums[c.labels[i]] += pts[i];
            ++counts[c.labels[i]];
        }
        for (std::size_t j = 0; j < k; ++j)
            if (counts[j] > 0) c.centers[j] = sums[j] / static_cast<double>(counts[j]);
        if (!changed && iter > 0) break;
    }
    return c;
}

// Mean silhouette over at most 2000 evenly strided points.
double silhouette(const std::vector<Eigen::Vector2d>& pts, const Clustering& c, std::size_t k) {
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 2000);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pts.size(); i += stride) idx.push_back(i);

    double total = 0.0;
    for (std::size_t i : idx) {
        std::vector<double> sum(k, 0.0);
        std::vector<std::size_t> cnt(k, 0);
        for (std::size_t j : idx) {
            if (j == i) continue;
            sum[c.labels[j]] += (pts[i] - pts[j]).norm();
            ++cnt[c.labels[j]];
        }
        const std::size_t own = c.labels[i];
        if (cnt[own] == 0) continue;  // singleton contributes 0
        const double a = sum[own] / static_cast<double>(cnt[own]);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j)
            if (j != own && cnt[j] > 0) b = std::min(b, sum[j] / static_cast<double>(cnt[j]));
        const double denom = std::max(a, b);
        if (std::isfinite(b) && denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(idx.size());
}

}  // namespace

double mahalanobis(const Eigen::Vector2d& point, const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov) {
    if (!point.allFinite() || !mean.allFinite() || !cov.allFinite())
        throw Error(ErrorCode::InvalidInput, "mahalanobis: non-finite input");
    Eigen::Matrix2d reg = cov;
    const double eps = 1e-8 * cov.trace();
    reg(0, 0) += eps;
    reg(1, 1) += eps;
    const double det = reg.determinant();
    if (!(det > 0.0) || !(reg(0, 0) > 0.0))
        throw Error(ErrorCode::DegenerateDistribution, "covariance is not positive definite");
    const Eigen::Vector2d d = point - mean;
    const double q = d.dot(reg.inverse() * d);
    return std::sqrt(std::max(q, 0.0));
}

Eigen::Vector2d order_point(const Covariates& x) {
    if (!(x.x1 > 0.0) || !(x.x2 > 0.0)) throw Error(ErrorCode::InvalidCovariate, "order covariates must be positive");
    return {std::log(x.x1), std::log(x.x2)};
}

Eigen::Vector2d stock_point(const Covariates& x) {
    if (!(x.x3 > 0.0) || !(x.x4 > 0.0)) throw Error(ErrorCode::InvalidCovariate, "stock covariates must be positive");
    return {std::log(x.x3), std::log(x.x4)};
}

HistoricalProfile fit_profile(std::string algo_id, std::span<const Covariates> history, std::size_t k_max) {
    if (history.size() < kMinProfileHistory)
        throw Error(ErrorCode::InsufficientHistory, "algorithm '" + algo_id + "' has " +
                                                        std::to_string(history.size()) + " observations, need " +
                                                        std::to_string(kMinProfileHistory));
    std::vector<Eigen::Vector2d> orders, stocks;
    for (const Covariates& x : history) {
        orders.push_back(order_point(x));
        stocks.push_back(stock_point(x));
    }

    HistoricalProfile profile;
    profile.algo_id = std::move(algo_id);
    profile.n_observations = history.size();
    profile.stock = fit_gaussian(stocks);

    std::size_t best_k = 1;
    double best_score = -1.0;
    Clustering best;
    for (std::size_t k = 2; k <= std::max<std::size_t>(k_max, 1); ++k) {
        if (k > orders.size() / 3) break;
        Clustering c = kmeans(orders, k);
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t l : c.labels) ++sizes[l];
        if (*std::min_element(sizes.begin(), sizes.end()) < 3) continue;
        const double s = silhouette(orders, c, k);
        if (s > best_score) {
            best_score = s;
            best_k = k;
            best = std::move(c);
        }
    }
    if (best_score < kMinSilhouette) best_k = 1;

    if (best_k == 1) {
        profile.order_clusters.push_back(fit_gaussian(orders));
    } else {
        for (std::size_t j = 0; j < best_k; ++j) {
            std::vector<Eigen::Vector2d> members;
            for (std::size_t i = 0; i < orders.size(); ++i)
                if (best.labels[i] == j) members.push_back(orders[i]);
            profile.order_clusters.push_back(fit_gaussian(members));
        }
    }
    return profile;
}

double order_distance(const HistoricalProfile& profile, const Covariates& x) {
    if (profile.order_clusters.empty())
        throw Error(ErrorCode::InvalidInput, "profile '" + profile.algo_id + "' has no order clusters");
    const Eigen::Vector2d p = order_point(x);
    double best = std::numeric_limits<double>::infinity();
    for (const Gaussian2& c : profile.order_clusters) best = std::min(best, mahalanobis(p, c.mean, c.cov));
    return best;
}

double stock_distance(const HistoricalProfile& profile, const Covariates& x) {
    return mahalanobis(stock_point(x), profile.stock.mean, profile.stock.cov);
}

std::vector<double> standardize(std::span<const double> values) {
    if (values.size() < 2) throw Error(ErrorCode::CannotStandardize, "need at least two values to standardize");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    std::vector<double> z(values.size(), 0.0);
    // Spreads at rounding level (e.g. after a common shift) count as zero.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) return z;
    for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - mean) / sd;
    return z;
}

std::vector<double> relevance_scores(const Covariates& x, std::span<const HistoricalProfile> profiles,
                                     const RelevanceWeights& weights) {
    if (profiles.size() < 2)
        throw Error(ErrorCode::CannotStandardize, "relevance needs at least two candidate algorithms");
    std::vector<double> d_order, d_stock;
    for (const HistoricalProfile& p : profiles) {
        d_order.push_back(order_distance(p, x));
        d_stock.push_back(stock_distance(p, x));
    }
    const std::vector<double> z_order = standardize(d_order);
    const std::vector<double> z_stock = standardize(d_stock);
    std::vector<double> r(profiles.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = weights.w_order * z_range(-z_order[i]) + weights.w_stock * z_range(-z_stock[i]);
    return r;
}

namespace {

BenchmarkWeights normalized(const BenchmarkWeights& w) {
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::ConfigError, "benchmark weights must be >= 0");
        sum += v;
    }
    if (!(sum > 0.0)) throw Error(ErrorCode::ConfigError, "benchmark weights must not all be zero");
    BenchmarkWeights out = w;
    for (double& v : out) v /= sum;
    return out;
}

std::vector<std::array<double, 4>> bounded_performance(std::span<const std::array<double, 4>> costs,
                                                       const BenchmarkWeights& w) {
    if (costs.size() < 2) throw Error(ErrorCode::CannotStandardize, "performance needs at least two algorithms");
    std::vector<std::array<double, 4>> out(costs.size(), std::array<double, 4>{});
    for (std::size_t b = 0; b < 4; ++b) {
        if (w[b] == 0.0) continue;
        std::vector<double> col;
        for (const auto& c : costs) {
            if (!std::isfinite(c[b]))
                throw Error(ErrorCode::CannotStandardize, "missing " +
                                                              std::string(to_string(static_cast<BenchmarkKind>(b))) +
                                                              " cost for a weighted benchmark");
            col.push_back(c[b]);
        }
        const std::vector<double> z = standardize(col);
        for (std::size_t a = 0; a < costs.size(); ++a) out[a][b] = z_range(z[a]);
    }
    return out;
}

}  // namespace

std::vector<double> performance_scores(std::span<const std::array<double, 4>> expected_costs,
                                       const BenchmarkWeights& weights) {
    const BenchmarkWeights w = normalized(weights);
    const auto bounded = bounded_performance(expected_costs, w);
    std::vector<double> p(expected_costs.size(), 0.0);
    for (std::size_t a = 0; a < p.size(); ++a)
        for (std::size_t b = 0; b < 4; ++b) p[a] += w[b] * bounded[a][b];
    return p;
}

std::vector<std::size_t> select_relevant(std::span<const ScoreCard> cards) {
    if (cards.empty()) return {};
    std::vector<std::size_t> order(cards.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cards[a].relevance != cards[b].relevance) return cards[a].relevance > cards[b].relevance;
        if (cards[a].n_observations != cards[b].n_observations)
            return cards[a].n_observations > cards[b].n_observations;
        return cards[a].algo_id < cards[b].algo_id;
    });
    const auto keep = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(cards.size()) - 1e-12));
    order.resize(std::max<std::size_t>(keep, 1));
    return order;
}

std::vector<ScoreCard> rank_algorithms(const Covariates& scenario, std::span<const AlgorithmInput> candidates,
                                       const RankingWeights& weights) {
    if (candidates.empty()) throw Error(ErrorCode::InvalidInput, "no candidate algorithms to rank");
    std::vector<ScoreCard> cards(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        cards[i].algo_id = candidates[i].profile.algo_id;
        cards[i].n_observations = candidates[i].profile.n_observations;
    }

    if (candidates.size() >= 2) {
        std::vector<HistoricalProfile> profiles;
        std::vector<std::array<double, 4>> costs;
        for (const AlgorithmInput& c : candidates) {
            profiles.push_back(c.profile);
            costs.push_back(c.expected_costs);
        }
        const std::vector<double> r = relevance_scores(scenario, profiles, weights.relevance);
        const BenchmarkWeights w = normalized(weights.benchmarks);
        const auto bounded = bounded_performance(costs, w);
        for (std::size_t i = 0; i < cards.size(); ++i) {
            cards[i].relevance = r[i];
            cards[i].bounded_z = bounded[i];
            double p = 0.0;
            for (std::size_t b = 0; b < 4; ++b) p += w[b] * bounded[i][b];
            cards[i].performance = p;
            cards[i].total = total_score(r[i], p, weights.w_r, weights.w_p);
        }
    }
    for (std::size_t i : select_relevant(cards)) cards[i].included = true;

    std::sort(cards.begin(), cards.end(), [](const ScoreCard& a, const ScoreCard& b) {
        if (a.included != b.included) return a.included;
        if (a.total != b.total) return a.total > b.total;
        if (a.n_observations != b.n_observations) return a.n_observations > b.n_observations;
        return a.algo_id < b.algo_id;
    });
    return cards;
}

std::string algo_wheel(std::span<const std::pair<std::string, CostPosterior>> costs, std::uint64_t seed) {
    if (costs.empty()) throw Error(ErrorCode::InvalidInput, "algo wheel needs at least one algorithm");
    std::vector<std::size_t> order(costs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a].first < costs[b].first; });
    Rng rng(seed);
    std::size_t best = order.front();
    double best_draw = -std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
        const double draw = sample_cost(costs[i].second, rng);
        if (draw > best_draw) {
            best_draw = draw;
            best = i;
        }
    }
    return costs[best].first;
}

}  // namespace tca
