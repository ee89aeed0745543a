#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tca/cost_estimator.hpp"
#include "tca/types.hpp"

namespace tca {

/// sqrt((p - m)^T cov^-1 (p - m)) with cov regularized by 1e-8 * trace on the
/// diagonal. Throws Error(DegenerateDistribution) if still singular.
double mahalanobis(const Eigen::Vector2d& point, const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov);

/// Bounded z-score 100 tanh(z), in (-100, 100).
inline double z_range(double z) { return 100.0 * std::tanh(z); }

struct Gaussian2 {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
    std::size_t count = 0;
};

// Historical usage of one algorithm: clusters of (ln x1, ln x2) order points
// and a single distribution of (ln x3, ln x4) stock points.
struct HistoricalProfile {
    std::string algo_id;
    std::vector<Gaussian2> order_clusters;
    Gaussian2 stock;
    std::size_t n_observations = 0;
};

inline constexpr std::size_t kMinProfileHistory = 10;
inline constexpr double kProfileVarianceFloor = 1e-6;
inline constexpr double kMinSilhouette = 0.5;

/// k-means on (ln x1, ln x2) for k = 1..k_max, keeping the k >= 2 with the best
/// silhouette when it reaches kMinSilhouette and k = 1 otherwise. Covariances
/// get a diagonal floor so duplicated points stay usable. Needs >= 10 rows.
HistoricalProfile fit_profile(std::string algo_id, std::span<const Covariates> history, std::size_t k_max = 4);

Eigen::Vector2d order_point(const Covariates& x);
Eigen::Vector2d stock_point(const Covariates& x);

/// Distance to the nearest order cluster.
double order_distance(const HistoricalProfile& profile, const Covariates& x);
double stock_distance(const HistoricalProfile& profile, const Covariates& x);

/// Cross-sectional z-scores with the population standard deviation; all zero
/// when the spread is zero. Throws Error(CannotStandardize) below 2 values.
std::vector<double> standardize(std::span<const double> values);

struct RelevanceWeights {
    double w_order = 2.0 / 3.0;
    double w_stock = 1.0 / 3.0;
};

/// R = w_order z_range(-z(d_order)) + w_stock z_range(-z(d_stock)); distances are
/// standardized across the candidate set so that nearer history scores higher.
std::vector<double> relevance_scores(const Covariates& x, std::span<const HistoricalProfile> profiles,
                                     const RelevanceWeights& weights = {});

// Indexed by BenchmarkKind.
using BenchmarkWeights = std::array<double, 4>;
inline constexpr BenchmarkWeights kEqualBenchmarkWeights = {0.25, 0.25, 0.25, 0.25};

/// P = sum_b w_b z_range(z_b), z_b standardizing each algorithm's posterior
/// mean E[y] against the other candidates (higher E[y] is better). Weights are
/// normalized to sum to one; benchmarks with zero weight may hold NaN.
std::vector<double> performance_scores(std::span<const std::array<double, 4>> expected_costs,
                                       const BenchmarkWeights& weights);

inline double total_score(double relevance, double performance, double w_r = 0.3, double w_p = 0.7) {
    return w_r * relevance + w_p * performance;
}

struct ScoreCard {
    std::string algo_id;
    std::size_t n_observations = 0;
    double relevance = 0.0;
    double performance = 0.0;
    double total = 0.0;
    std::array<double, 4> bounded_z{};  // per benchmark, 0 for unweighted ones
    bool included = false;
};

/// Indices of the ceil(0.2 N) most relevant cards (never empty). Ties go to
/// more observations, then to the lexicographically smaller algo_id.
std::vector<std::size_t> select_relevant(std::span<const ScoreCard> cards);

struct RankingWeights {
    RelevanceWeights relevance;
    double w_r = 0.3;
    double w_p = 0.7;
    BenchmarkWeights benchmarks = kEqualBenchmarkWeights;
};

struct AlgorithmInput {
    HistoricalProfile profile;
    std::array<double, 4> expected_costs{};  // posterior mean E[y] per benchmark
};

/// Full scoring pass. Returned cards are ordered: relevant ones first, each
/// group by descending total score, ties by observation count then algo_id.
/// A single candidate is ranked first with zero scores.
std::vector<ScoreCard> rank_algorithms(const Covariates& scenario, std::span<const AlgorithmInput> candidates,
                                       const RankingWeights& weights = {});

/// Probabilistic routing: draws one cost per algorithm and returns the id with
/// the highest (least negative) draw. Deterministic per seed.
std::string algo_wheel(std::span<const std::pair<std::string, CostPosterior>> costs, std::uint64_t seed);

}  // namespace tca
