#include <doctest.h>

#include <random>

#include "tca/diagnostics.hpp"
#include "tca/error.hpp"
#include "tca/rng.hpp"

using namespace tca;
using diagnostics::Chains;

namespace {

Chains iid_chains(std::size_t m, std::size_t n, std::uint64_t seed, double shift_last = 0.0) {
    Rng rng(seed);
    std::normal_distribution<double> z;
    Chains c(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i)
        for (double& v : c[i]) v = z(rng) + (i + 1 == m ? shift_last : 0.0);
    return c;
}

Chains ar1_chains(std::size_t m, std::size_t n, double phi, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> z;
    Chains c(m, std::vector<double>(n));
    for (auto& chain : c) {
        double x = z(rng) / std::sqrt(1.0 - phi * phi);
        for (double& v : chain) {
            x = phi * x + z(rng);
            v = x;
        }
    }
    return c;
}

}  // namespace

TEST_CASE("average ranks") {
    const std::vector<double> v{3.0, 1.0, 2.0, 1.0};
    CHECK(diagnostics::average_ranks(v) == std::vector<double>{4.0, 1.5, 3.0, 1.5});
}

TEST_CASE("split halves") {
    const Chains c{{1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}};
    const Chains s = diagnostics::split(c);
    REQUIRE(s.size() == 4);
    CHECK(s[0] == std::vector<double>{1, 2});
    CHECK(s[1] == std::vector<double>{4, 5});
    CHECK(s[3] == std::vector<double>{9, 10});
}

TEST_CASE("classic rhat by hand") {
    // Chain means 1 and 3, within variances 1 and 1, n = 3.
    const Chains c{{0, 1, 2}, {2, 3, 4}};
    // B = n * var(means) = 3 * 2 = 6, W = 1, var+ = (2/3) * 1 + 6/3 = 8/3.
    CHECK(diagnostics::rhat(c) == doctest::Approx(std::sqrt(8.0 / 3.0)));
}

TEST_CASE("well mixed chains") {
    const Chains c = iid_chains(4, 2000, 1);
    const double r = diagnostics::rank_normalized_split_rhat(c);
    CHECK(r < 1.01);
    CHECK(r > 0.99);
    const double ess = diagnostics::effective_sample_size(c);
    CHECK(ess > 6000.0);
    CHECK(ess < 10000.0);
}

TEST_CASE("stuck chain is flagged") {
    CHECK(diagnostics::rank_normalized_split_rhat(iid_chains(4, 1000, 2, 3.0)) > 1.1);
    // A trend inside each chain shows up once the chains are split.
    Chains trend(2, std::vector<double>(500));
    for (auto& c : trend)
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<double>(i);
    CHECK(diagnostics::rank_normalized_split_rhat(trend) > 1.5);
}

TEST_CASE("autocorrelation lowers ess") {
    // An AR(1) process with phi 0.9 has ESS / N near (1 - phi) / (1 + phi).
    const Chains c = ar1_chains(4, 5000, 0.9, 3);
    const double ratio = diagnostics::effective_sample_size(c) / 20000.0;
    CHECK(ratio == doctest::Approx(0.1 / 1.9).epsilon(0.25));
}

TEST_CASE("degenerate inputs") {
    CHECK(diagnostics::rank_normalized_split_rhat({{1, 1, 1, 1}, {1, 1, 1, 1}}) == 1.0);
    CHECK_THROWS_AS(diagnostics::rhat({}), Error);
    CHECK_THROWS_AS(diagnostics::rhat({{1, 2, 3}, {1, 2}}), Error);
}
