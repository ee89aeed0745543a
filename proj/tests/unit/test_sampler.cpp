#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tca/ald.hpp"
#include "tca/error.hpp"
#include "tca/sampler.hpp"
#include "tca/synth.hpp"

using namespace tca;

namespace {

SamplingProblem standard_normal(std::size_t dim = 1) {
    std::vector<std::string> names;
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t i = 0; i < dim; ++i) {
        names.push_back("x" + std::to_string(i));
        blocks.push_back({i});
    }
    return function_problem(names, std::vector<double>(dim, 0.0), blocks, std::vector<double>(dim, 1.0),
                            [](std::span<const double> x) {
                                double s = 0.0;
                                for (double v : x) s += v * v;
                                return -0.5 * s;
                            });
}

ChainConfig short_config(std::uint64_t seed = 1) {
    ChainConfig c;
    c.n_iter = 3000;
    c.n_burn = 1000;
    c.thinning = 2;
    c.n_chains = 2;
    c.seed = seed;
    return c;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
}

}  // namespace

TEST_CASE("chain configuration") {
    const ChainConfig desk = ChainConfig::desk();
    CHECK(desk.n_iter == 20000);
    CHECK(desk.n_burn == 10000);
    CHECK(desk.thinning == 5);
    CHECK(desk.n_chains == 4);
    CHECK(desk.retained_per_chain() == 2000);
    const ChainConfig long_run = ChainConfig::long_run();
    CHECK(long_run.n_iter == 500000);
    CHECK(long_run.n_burn == 400000);
    CHECK(long_run.thinning == 20);

    auto bad = desk;
    bad.n_burn = bad.n_iter;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = desk;
    bad.thinning = 0;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = desk;
    bad.n_chains = 1;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = desk;
    bad.step_scales = {1.0, -1.0};
    CHECK_THROWS_AS(validate(bad), Error);
    try {
        validate(bad);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
}

TEST_CASE("retained draw bookkeeping") {
    for (auto [iter, burn, thin] : {std::tuple{3000, 1000, 2}, std::tuple{1001, 1, 7}, std::tuple{500, 100, 1}}) {
        ChainConfig c = short_config();
        c.n_iter = iter;
        c.n_burn = burn;
        c.thinning = thin;
        c.n_chains = 3;
        const auto s = run_mh(standard_normal(2), c);
        CHECK(s.rows() == 3 * ((iter - burn) / thin));
        CHECK(s.cols() == 2);
        CHECK(s.chain.size() == s.rows());
        CHECK(s.chain.front() == 0);
        CHECK(s.chain.back() == 2);
        CHECK(s.rhat.size() == 2);
        CHECK(s.ess.size() == 2);
    }
}

TEST_CASE("standard normal target") {
    ChainConfig c;
    c.n_iter = 60000;
    c.n_burn = 10000;
    c.thinning = 2;
    c.n_chains = 4;
    c.seed = 17;
    const auto s = run_mh(standard_normal(), c);
    REQUIRE(s.rows() == 100000);
    const auto x = s.column(0);
    CHECK(std::abs(mean_of(x)) <= 0.05);
    CHECK(variance_of(x) >= 0.9);
    CHECK(variance_of(x) <= 1.1);
    CHECK(s.rhat[0] <= 1.02);
    CHECK(s.rhat[0] > 0.0);
    CHECK(s.acceptance_rate > 0.2);
    CHECK(s.acceptance_rate < 0.6);
}

TEST_CASE("flat target accepts every proposal") {
    auto p = function_problem({"a", "b"}, {0.0, 0.0}, {{0, 1}}, {1.0, 1.0}, [](std::span<const double>) { return 0.0; });
    const auto s = run_mh(p, short_config());
    CHECK(s.acceptance_rate == 1.0);
}

TEST_CASE("determinism") {
    const auto a = run_mh(standard_normal(3), short_config(5));
    const auto b = run_mh(standard_normal(3), short_config(5));
    const auto c = run_mh(standard_normal(3), short_config(6));
    CHECK(a.draws == b.draws);
    CHECK(a.rhat == b.rhat);
    CHECK(a.draws != c.draws);
}

TEST_CASE("proposals are frozen after burn-in") {
    auto cfg = short_config(9);
    const auto a = run_mh(standard_normal(2), cfg);
    cfg.n_iter = 20000;
    const auto b = run_mh(standard_normal(2), cfg);
    REQUIRE(a.proposal_std.size() == 2);
    CHECK(a.proposal_std == b.proposal_std);
    // Early retained draws do not depend on how long the chain keeps going.
    const std::size_t n = a.rows() / 2 * 2;
    CHECK(std::equal(a.draws.begin(), a.draws.begin() + n / 2, b.draws.begin()));

    cfg.adapt_during_burn = false;
    cfg.step_scales = {0.7, 0.3};
    const auto fixed = run_mh(standard_normal(2), cfg);
    for (const auto& chain : fixed.proposal_std) {
        CHECK(chain[0] == doctest::Approx(0.7));
        CHECK(chain[1] == doctest::Approx(0.3));
    }
}

TEST_CASE("step adaptation") {
    CHECK(adapt_step(0.05, 1.0) < 1.0);
    CHECK(adapt_step(0.8, 1.0) > 1.0);
    CHECK(adapt_step(0.3, 1.0) == 1.0);
    CHECK(adapt_step(0.2, 1.0) == 1.0);
    CHECK(adapt_step(0.4, 1.0) == 1.0);
    CHECK(adapt_step(0.0, 1.0) > 0.0);
    const std::vector<double> rates{0.05, 0.3, 0.9}, steps{1.0, 2.0, 3.0};
    const auto out = adapt_steps(rates, steps);
    CHECK(out[0] < 1.0);
    CHECK(out[1] == 2.0);
    CHECK(out[2] > 3.0);
}

TEST_CASE("divergence is reported") {
    auto p = function_problem({"a"}, {0.0}, {{0}}, {1.0},
                              [](std::span<const double> x) { return x[0] == 0.0 ? 0.0 : NAN; });
    try {
        run_mh(p, short_config());
        FAIL("expected DivergentChain");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DivergentChain);
    }
    auto start = function_problem({"a"}, {0.0}, {{0}}, {1.0}, [](std::span<const double>) { return -INFINITY; });
    CHECK_THROWS_AS(run_mh(start, short_config()), Error);
}

TEST_CASE("prior-only regression recovers the prior") {
    ModelSpec spec;
    spec.kind = BenchmarkKind::IS;
    spec.prior = default_prior(spec.kind);
    ChainConfig c;
    c.n_iter = 60000;
    c.n_burn = 10000;
    c.thinning = 5;
    c.seed = 23;
    const auto s = run_mh(regression_problem(spec, {}), c);
    const auto beta0 = s.column(0);
    CHECK(std::abs(mean_of(beta0)) <= 0.1);
    CHECK(std::abs(std::sqrt(variance_of(beta0)) - 2.0) <= 0.2);
    const auto alpha0 = s.column(*s.index_of("alpha0"));
    CHECK(std::abs(mean_of(alpha0) + 5.0) <= 0.15);
}

TEST_CASE("model runs check their inputs") {
    ModelSpec spec;
    spec.kind = BenchmarkKind::IS;
    spec.prior = default_prior(spec.kind);
    CHECK_THROWS_AS(run_mh(spec, {}, short_config()), Error);

    std::vector<BenchmarkObservation> wrong{{-5.0, BenchmarkKind::VWAP, {0.01, 10, 20, 5}, "A", {}}};
    CHECK_THROWS_AS(run_mh(spec, wrong, short_config()), Error);

    ModelSpec per = spec;
    per.pooling = PerAlgo{{"A"}};
    std::vector<BenchmarkObservation> stranger{{-5.0, BenchmarkKind::IS, {0.01, 10, 20, 5}, "B", {}}};
    CHECK_THROWS_AS(run_mh(per, stranger, short_config()), Error);
}

TEST_CASE("short regression fit moves towards the truth") {
    const auto cfg = synth::default_config(BenchmarkKind::IS, 2000, 77);
    const auto obs = synth::generate(cfg);
    ModelSpec spec;
    spec.kind = BenchmarkKind::IS;
    spec.prior = default_prior(spec.kind);
    ChainConfig c;
    c.n_iter = 6000;
    c.n_burn = 3000;
    c.thinning = 3;
    c.seed = 3;
    const auto s = run_mh(spec, obs, c);
    CHECK(s.kind == BenchmarkKind::IS);
    CHECK_FALSE(s.hierarchical());
    const auto truth = cfg.algos[0].truth.flat();
    for (std::size_t j = 0; j < s.cols(); ++j) {
        CAPTURE(s.names[j]);
        CHECK(std::abs(s.summary[j].mean - truth[j]) < 5.0 * s.summary[j].std + 0.05);
    }
}

TEST_CASE("hierarchical regression layout") {
    synth::SynthConfig cfg = synth::default_config(BenchmarkKind::VWAP, 300, 4);
    cfg.algos[0].algo_id = "A";
    cfg.algos.push_back({"B", synth::reference_truth(BenchmarkKind::VWAP), 200});
    const auto obs = synth::generate(cfg);
    ModelSpec spec;
    spec.kind = BenchmarkKind::VWAP;
    spec.prior = default_prior(spec.kind);
    spec.pooling = PerAlgo{{"A", "B", "C"}};
    const auto s = run_mh(spec, obs, short_config(2));
    CHECK(s.hierarchical());
    CHECK(s.algo_ids == std::vector<std::string>{"A", "B", "C"});
    CHECK(s.names == hierarchical_names(BenchmarkKind::VWAP, s.algo_ids));
    const auto c = extract_algorithm(s, "C");
    CHECK(c.names == coefficient_names(BenchmarkKind::VWAP));
    CHECK(c.rows() == s.rows());
}

TEST_CASE("posterior predictive") {
    PosteriorSamples one;
    one.kind = BenchmarkKind::IS;
    one.names = coefficient_names(one.kind);
    one.n_chains = 1;
    one.chain = {0};
    one.draws = synth::reference_truth(one.kind).flat();
    one.summarize();
    const Covariates x{0.01, 25.0, 30.0, 10.0};
    const auto ys = posterior_predictive(one, std::span<const Covariates>(&x, 1), 200000, 8);
    REQUIRE(ys.size() == 200000);
    const auto p = link(synth::reference_truth(one.kind), x, one.kind);
    CHECK(std::abs(mean_of(ys) - ald::mean(p)) < 4.0 * std::sqrt(ald::variance(p) / ys.size()));
    CHECK(std::abs(variance_of(ys) / ald::variance(p) - 1.0) < 0.03);
    CHECK(posterior_predictive(one, std::span<const Covariates>(&x, 1), 10, 8) ==
          posterior_predictive(one, std::span<const Covariates>(&x, 1), 10, 8));

    SUBCASE("mixture variance is at least the mean within-draw variance") {
        PosteriorSamples two = one;
        auto shifted = synth::reference_truth(one.kind).flat();
        shifted[0] += 0.8;
        shifted[5] -= 0.3;
        two.draws.insert(two.draws.end(), shifted.begin(), shifted.end());
        two.chain = {0, 0};
        two.summarize();
        const auto mix = posterior_predictive(two, std::span<const Covariates>(&x, 1), 100000, 9);
        const double within = 0.5 * (ald::variance(p) +
                                     ald::variance(link(std::span<const double>(shifted), x, one.kind)));
        CHECK(variance_of(mix) >= 0.97 * within);
    }
}
