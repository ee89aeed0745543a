#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "tca/error.hpp"
#include "tca/ranking.hpp"
#include "tca/rng.hpp"

using namespace tca;

namespace {

std::vector<Covariates> blob(double x1, double x2, std::size_t n, std::uint64_t seed, double x3 = 30.0,
                             double x4 = 10.0) {
    Rng rng(seed);
    std::normal_distribution<double> z(0.0, 0.1);
    std::vector<Covariates> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({x1 * std::exp(z(rng)), x2 * std::exp(z(rng)), x3 * std::exp(z(rng)), x4 * std::exp(z(rng))});
    return out;
}

ScoreCard card(std::string id, double relevance, std::size_t n = 100) {
    ScoreCard c;
    c.algo_id = std::move(id);
    c.relevance = relevance;
    c.n_observations = n;
    return c;
}

}  // namespace

TEST_CASE("mahalanobis distance") {
    Eigen::Matrix2d cov;
    cov << 4.0, 0.0, 0.0, 1.0;
    CHECK(mahalanobis({1.0, 0.0}, {0.0, 0.0}, cov) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(mahalanobis({0.0, 2.0}, {0.0, 0.0}, cov) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(mahalanobis({3.0, 3.0}, {3.0, 3.0}, cov) == 0.0);
    // Singular covariance is rescued by the trace regularization.
    Eigen::Matrix2d line;
    line << 1.0, 1.0, 1.0, 1.0;
    CHECK(std::isfinite(mahalanobis({1.0, 1.0}, {0.0, 0.0}, line)));
    CHECK_THROWS_AS(mahalanobis({1.0, 1.0}, {0.0, 0.0}, Eigen::Matrix2d::Zero()), Error);
}

TEST_CASE("bounded z-score") {
    CHECK(z_range(0.0) == 0.0);
    CHECK(z_range(1.0) == doctest::Approx(76.15941559557649).epsilon(1e-14));
    CHECK(z_range(-1.0) == doctest::Approx(-76.15941559557649).epsilon(1e-14));
    CHECK(z_range(50.0) <= 100.0);
    for (double z = -5.0; z < 5.0; z += 0.25) CHECK(z_range(z) < z_range(z + 0.25));
}

TEST_CASE("standardize") {
    const std::vector<double> v{1.0, 2.0, 3.0};
    const auto z = standardize(v);
    const double sd = std::sqrt(2.0 / 3.0);
    CHECK(z[0] == doctest::Approx(-1.0 / sd));
    CHECK(z[1] == doctest::Approx(0.0));
    CHECK(z[2] == doctest::Approx(1.0 / sd));
    CHECK(standardize(std::vector<double>{4.0, 4.0}) == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(standardize(std::vector<double>{1.0}), Error);
}

TEST_CASE("relevant subset size") {
    for (std::size_t n : {1u, 2u, 4u, 5u, 6u, 10u, 11u, 23u}) {
        std::vector<ScoreCard> cards;
        for (std::size_t i = 0; i < n; ++i) cards.push_back(card("A" + std::to_string(i), static_cast<double>(i)));
        const auto keep = select_relevant(cards);
        CAPTURE(n);
        CHECK(keep.size() == std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.2 * n))));
        CHECK(keep.front() == n - 1);
    }
    // Ties: more history first, then the smaller id.
    std::vector<ScoreCard> tied{card("B", 1.0, 10), card("A", 1.0, 10), card("C", 1.0, 20), card("D", 0.0),
                                card("E", 0.0), card("F", 0.0)};
    const auto keep = select_relevant(tied);
    REQUIRE(keep.size() == 2);
    CHECK(tied[keep[0]].algo_id == "C");
    CHECK(tied[keep[1]].algo_id == "A");
}

TEST_CASE("performance scores") {
    // Two algorithms, IS only: standardized means are -1 and +1.
    const std::vector<std::array<double, 4>> costs{{-20.0, NAN, NAN, NAN}, {-10.0, NAN, NAN, NAN}};
    const auto p = performance_scores(costs, {1.0, 0.0, 0.0, 0.0});
    CHECK(p[0] == doctest::Approx(-76.15941559557649));
    CHECK(p[1] == doctest::Approx(76.15941559557649));

    const std::vector<std::array<double, 4>> two{{-20.0, -5.0, 0.0, 0.0}, {-10.0, -15.0, 0.0, 0.0}};
    const auto q = performance_scores(two, {2.0, 2.0, 0.0, 0.0});
    CHECK(q[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("performance is invariant to a common shift") {
    Rng rng(4);
    std::normal_distribution<double> z(-15.0, 5.0);
    std::vector<std::array<double, 4>> costs(7);
    for (auto& c : costs)
        for (double& v : c) v = z(rng);
    const auto base = performance_scores(costs, kEqualBenchmarkWeights);
    for (double shift : {-30.0, 4.0, 100.0}) {
        auto moved = costs;
        for (auto& c : moved)
            for (double& v : c) v += shift;
        const auto after = performance_scores(moved, kEqualBenchmarkWeights);
        for (std::size_t i = 0; i < costs.size(); ++i) CHECK(after[i] == doctest::Approx(base[i]).epsilon(1e-9));
    }
}

TEST_CASE("total score") {
    CHECK(total_score(50.0, -10.0) == doctest::Approx(8.0));
    CHECK(total_score(100.0, 100.0) == doctest::Approx(100.0));
}

TEST_CASE("profiles") {
    const auto one = fit_profile("ONE", blob(0.01, 10.0, 200, 1));
    CHECK(one.order_clusters.size() == 1);
    CHECK(one.n_observations == 200);
    CHECK(one.order_clusters[0].mean[0] == doctest::Approx(std::log(0.01)).epsilon(0.01));

    auto two_pts = blob(0.002, 2.0, 150, 2);
    const auto far = blob(0.1, 30.0, 150, 3);
    two_pts.insert(two_pts.end(), far.begin(), far.end());
    const auto two = fit_profile("TWO", two_pts);
    REQUIRE(two.order_clusters.size() == 2);
    std::size_t total = 0;
    for (const auto& c : two.order_clusters) total += c.count;
    CHECK(total == 300);
    // Each blob centre sits close to its own cluster.
    CHECK(order_distance(two, {0.002, 2.0, 30, 10}) < 1.0);
    CHECK(order_distance(two, {0.1, 30.0, 30, 10}) < 1.0);
    CHECK(order_distance(two, {0.015, 8.0, 30, 10}) > 3.0);

    const std::vector<Covariates> dup(20, Covariates{0.01, 10.0, 30.0, 10.0});
    const auto same = fit_profile("DUP", dup);
    CHECK(order_distance(same, dup[0]) == doctest::Approx(0.0));
    CHECK(std::isfinite(stock_distance(same, {0.02, 10.0, 35.0, 10.0})));

    CHECK_THROWS_AS(fit_profile("FEW", blob(0.01, 10.0, 9, 4)), Error);
}

TEST_CASE("full ranking") {
    std::vector<AlgorithmInput> in;
    const std::vector<std::pair<double, double>> centres{{0.01, 10}, {0.05, 20}, {0.002, 3}, {0.1, 35}, {0.02, 5}};
    for (std::size_t i = 0; i < centres.size(); ++i) {
        AlgorithmInput a;
        a.profile = fit_profile("ALG" + std::to_string(i), blob(centres[i].first, centres[i].second, 50, 10 + i));
        a.expected_costs = {-10.0 - i, -5.0 - i, -8.0 + i, 1.0};
        in.push_back(a);
    }
    const Covariates scenario{0.01, 10.0, 30.0, 10.0};
    const auto cards = rank_algorithms(scenario, in);
    REQUIRE(cards.size() == 5);
    CHECK(cards[0].algo_id == "ALG0");
    CHECK(cards[0].included);
    CHECK(std::count_if(cards.begin(), cards.end(), [](const ScoreCard& c) { return c.included; }) == 1);
    for (const auto& c : cards) {
        CHECK(c.relevance > -100.0);
        CHECK(c.relevance < 100.0);
        CHECK(c.total == doctest::Approx(0.3 * c.relevance + 0.7 * c.performance));
    }

    // Reordering the candidates does not change any card.
    std::vector<AlgorithmInput> rev(in.rbegin(), in.rend());
    const auto again = rank_algorithms(scenario, rev);
    for (std::size_t i = 0; i < cards.size(); ++i) {
        CHECK(again[i].algo_id == cards[i].algo_id);
        CHECK(again[i].total == doctest::Approx(cards[i].total));
    }

    const auto single = rank_algorithms(scenario, std::span<const AlgorithmInput>(in.data(), 1));
    REQUIRE(single.size() == 1);
    CHECK(single[0].included);
    CHECK(single[0].total == 0.0);
}

TEST_CASE("algo wheel") {
    CostPosterior good, bad;
    Rng rng(9);
    std::normal_distribution<double> g(-8.0, 2.0), b(-12.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
        good.values.push_back(g(rng));
        bad.values.push_back(b(rng));
    }
    const std::vector<std::pair<std::string, CostPosterior>> costs{{"BAD", bad}, {"GOOD", good}};
    std::map<std::string, int> wins;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) ++wins[algo_wheel(costs, seed)];
    CHECK(wins["GOOD"] > 5000);
    CHECK(wins["BAD"] > 0);
    CHECK(algo_wheel(costs, 77) == algo_wheel(costs, 77));
}
