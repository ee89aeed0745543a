#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tca/error.hpp"
#include "tca/synth.hpp"

using namespace tca;

TEST_CASE("reference truth shapes") {
    for (BenchmarkKind kind : kAllKinds) {
        const auto t = synth::reference_truth(kind);
        CHECK(t.flat().size() == coefficient_count(kind));
    }
    const auto pwp = synth::reference_truth(BenchmarkKind::PWP20);
    REQUIRE(pwp.gamma.size() == 7);
    CHECK(pwp.gamma[6] > 0.0);
}

TEST_CASE("generated rows respect their ranges") {
    const auto cfg = synth::default_config(BenchmarkKind::VWAP, 5000, 1);
    const auto obs = synth::generate(cfg);
    REQUIRE(obs.size() == 5000);
    for (const auto& o : obs) {
        CHECK(o.kind == BenchmarkKind::VWAP);
        CHECK(o.algo_id == "ALGO");
        CHECK(o.x.x1 >= 0.001);
        CHECK(o.x.x1 <= 0.2);
        CHECK(o.x.x2 >= 1.0);
        CHECK(o.x.x2 <= 40.0);
        CHECK(o.x.x3 >= 10.0);
        CHECK(o.x.x4 <= 50.0);
        CHECK(std::isfinite(o.y));
        CHECK_FALSE(o.duration_min.has_value());
    }
}

TEST_CASE("log-uniform covariates") {
    auto cfg = synth::default_config(BenchmarkKind::IS, 40000, 2);
    const auto obs = synth::generate(cfg);
    double s = 0.0;
    for (const auto& o : obs) s += std::log(o.x.x2);
    // Mean of ln x2 for log-uniform on [1, 40] is ln(40) / 2.
    CHECK(s / obs.size() == doctest::Approx(std::log(40.0) / 2.0).epsilon(0.01));
}

TEST_CASE("responses follow the model mean") {
    auto cfg = synth::default_config(BenchmarkKind::IS, 1, 3);
    cfg.ranges.x1 = {0.01, 0.01};
    cfg.ranges.x2 = {25.0, 25.0};
    cfg.ranges.x3 = {30.0, 30.0};
    cfg.ranges.x4 = {10.0, 10.0};
    cfg.algos[0].n = 200000;
    const auto obs = synth::generate(cfg);
    double s = 0.0;
    for (const auto& o : obs) s += o.y;
    const auto p = link(cfg.algos[0].truth, {0.01, 25.0, 30.0, 10.0}, BenchmarkKind::IS);
    CHECK(std::abs(s / obs.size() - ald::mean(p)) < 4.0 * std::sqrt(ald::variance(p) / obs.size()));
}

TEST_CASE("determinism and per-algorithm streams") {
    auto cfg = synth::default_config(BenchmarkKind::Rev5m, 100, 4);
    const auto a = synth::generate(cfg);
    const auto b = synth::generate(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].y == b[i].y);

    cfg.algos.push_back({"SECOND", synth::reference_truth(BenchmarkKind::Rev5m), 50});
    const auto c = synth::generate(cfg);
    REQUIRE(c.size() == 150);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(c[i].y == a[i].y);
    CHECK(c.back().algo_id == "SECOND");
}

TEST_CASE("invalid configurations") {
    auto cfg = synth::default_config(BenchmarkKind::IS, 10, 5);
    cfg.ranges.x1 = {0.0005, 0.1};
    CHECK_THROWS_AS(synth::validate(cfg), Error);
    cfg = synth::default_config(BenchmarkKind::IS, 10, 5);
    cfg.ranges.x3 = {20.0, 10.0};
    CHECK_THROWS_AS(synth::validate(cfg), Error);
    cfg = synth::default_config(BenchmarkKind::IS, 10, 5);
    cfg.algos[0].truth = synth::reference_truth(BenchmarkKind::PWP20);
    CHECK_THROWS_AS(synth::validate(cfg), Error);
    try {
        synth::validate(cfg);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
}

TEST_CASE("recovery report") {
    const auto truth = synth::reference_truth(BenchmarkKind::IS);
    PosteriorSamples s;
    s.kind = BenchmarkKind::IS;
    s.names = coefficient_names(s.kind);
    s.n_chains = 1;
    for (int r = -50; r <= 50; ++r) {
        auto row = truth.flat();
        for (double& v : row) v += 0.01 * r + 0.1;
        s.draws.insert(s.draws.end(), row.begin(), row.end());
        s.chain.push_back(0);
    }
    s.summarize();
    const auto rep = synth::recovery_report(truth, s);
    REQUIRE(rep.size() == coefficient_count(BenchmarkKind::IS));
    for (const auto& e : rep) {
        CHECK(e.bias == doctest::Approx(0.1));
        CHECK(e.covered);
        CHECK(e.z_distance == doctest::Approx(0.1 / e.posterior_std));
    }
}
