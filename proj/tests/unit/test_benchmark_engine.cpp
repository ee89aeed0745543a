#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "tca/benchmark_engine.hpp"
#include "tca/error.hpp"

using namespace tca;
using tca::test::kMinute;
using tca::test::make_record;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::DataError;
}

}  // namespace

TEST_CASE("average execution price") {
    CHECK(average_execution_price(std::vector<Fill>{{0, 100.0, 50.0}}) == doctest::Approx(100.0));
    CHECK(average_execution_price(std::vector<Fill>{{0, 100.0, 100.0}, {1, 102.0, 300.0}}) ==
          doctest::Approx(101.5).epsilon(1e-15));
    CHECK(average_execution_price(std::vector<Fill>{{0, 99.0, 10.0}, {1, 101.0, 10.0}}) == doctest::Approx(100.0));
    CHECK(code_of([] { average_execution_price(std::vector<Fill>{}); }) == ErrorCode::EmptyFills);
}

TEST_CASE("implementation shortfall") {
    CHECK(is_bps(make_record(Side::Buy, 100.0, {{1, 100.0, 100.0}})) == doctest::Approx(0.0));
    CHECK(is_bps(make_record(Side::Buy, 100.0, {{1, 101.0, 100.0}})) == doctest::Approx(-99.00990099009901));
    CHECK(is_bps(make_record(Side::Sell, 100.0, {{1, 101.0, 100.0}})) == doctest::Approx(99.00990099009901));
    CHECK(code_of([] { is_bps(make_record(Side::Buy, 0.0, {{1, 101.0, 100.0}})); }) == ErrorCode::InvalidPrice);
}

TEST_CASE("vwap benchmark") {
    const auto buy = make_record(Side::Buy, 100.0, {{kMinute, 100.0, 100.0}});
    const std::vector<TapeTrade> tape{{2 * kMinute, 101.0, 200.0}};
    CHECK(vwap_bps(buy, tape) == doctest::Approx(100.0));
    auto sell = buy;
    sell.side = Side::Sell;
    CHECK(vwap_bps(sell, tape) == doctest::Approx(-100.0));
    CHECK(vwap_bps(buy, std::vector<TapeTrade>{{kMinute, 100.0, 10.0}}) == doctest::Approx(0.0));

    SUBCASE("interval is closed at both ends") {
        const std::vector<TapeTrade> edges{{-1, 500.0, 1.0}, {0, 101.0, 1.0}, {10 * kMinute, 101.0, 1.0},
                                           {10 * kMinute + 1, 500.0, 1.0}};
        CHECK(vwap_bps(buy, edges) == doctest::Approx(100.0));
    }
    SUBCASE("no tape in the order interval") {
        const std::vector<TapeTrade> outside{{11 * kMinute, 101.0, 200.0}};
        CHECK(code_of([&] { vwap_bps(buy, outside); }) == ErrorCode::NoTapeData);
    }
}

TEST_CASE("participation weighted price") {
    const auto buy = make_record(Side::Buy, 100.0, {{kMinute, 100.0, 100.0}});

    SUBCASE("pro-rata crossing trade") {
        const std::vector<TapeTrade> tape{{kMinute, 100.0, 300.0}, {2 * kMinute, 110.0, 400.0}};
        const PwpResult r = pwp_bps(buy, tape);
        CHECK(r.window_volume == 500.0);
        CHECK(r.window_price == doctest::Approx(104.0).epsilon(1e-15));
        CHECK(r.bps == doctest::Approx(400.0));
        CHECK_FALSE(r.partial);
    }
    SUBCASE("window is size / rate") {
        const std::vector<TapeTrade> tape{{kMinute, 100.0, 10000.0}};
        CHECK(pwp_bps(buy, tape).window_volume == 500.0);
        CHECK(pwp_bps(buy, tape, 50.0).window_volume == 200.0);
    }
    SUBCASE("constant tape price") {
        const std::vector<TapeTrade> tape{{kMinute, 100.0, 100.0}, {2 * kMinute, 100.0, 900.0}};
        CHECK(pwp_bps(buy, tape).bps == doctest::Approx(0.0));
    }
    SUBCASE("tape exhausted marks the result partial") {
        const std::vector<TapeTrade> tape{{kMinute, 100.0, 100.0}, {2 * kMinute, 102.0, 100.0}};
        const PwpResult r = pwp_bps(buy, tape);
        CHECK(r.partial);
        CHECK(r.window_volume == 200.0);
        CHECK(r.window_price == doctest::Approx(101.0));
    }
    SUBCASE("trades before the start are ignored") {
        const std::vector<TapeTrade> tape{{-kMinute, 50.0, 1000.0}, {0, 100.0, 1000.0}};
        CHECK(pwp_bps(buy, tape).window_price == doctest::Approx(100.0));
    }
    SUBCASE("errors") {
        CHECK(code_of([&] { pwp_bps(buy, std::vector<TapeTrade>{{-kMinute, 50.0, 10.0}}); }) ==
              ErrorCode::NoTapeData);
        CHECK(code_of([&] { pwp_bps(buy, std::vector<TapeTrade>{{kMinute, 50.0, 10.0}}, 0.0); }) ==
              ErrorCode::InvalidInput);
        CHECK(code_of([&] { pwp_bps(buy, std::vector<TapeTrade>{{kMinute, 50.0, 10.0}}, 120.0); }) ==
              ErrorCode::InvalidInput);
    }
}

TEST_CASE("post-trade reversion") {
    const auto buy = make_record(Side::Buy, 100.0, {{kMinute, 101.0, 50.0}, {2 * kMinute, 100.0, 50.0}});
    const std::vector<TapeTrade> tape{{2 * kMinute + 1000, 99.5, 100.0}};
    CHECK(rev5m_bps(buy, tape) == doctest::Approx(-50.0));
    auto sell = buy;
    sell.side = Side::Sell;
    CHECK(rev5m_bps(sell, tape) == doctest::Approx(50.0));
    CHECK(rev5m_bps(buy, std::vector<TapeTrade>{{3 * kMinute, 100.0, 1.0}}) == doctest::Approx(0.0));

    SUBCASE("window is (last fill, last fill + 5 min]") {
        const EpochMs last = 2 * kMinute;
        const std::vector<TapeTrade> edges{{last, 500.0, 1.0},
                                           {last + 1, 99.0, 1.0},
                                           {last + kReversionWindowMs, 99.0, 1.0},
                                           {last + kReversionWindowMs + 1, 500.0, 1.0}};
        CHECK(rev5m_bps(buy, edges) == doctest::Approx(-100.0));
    }
    SUBCASE("no post-trade tape") {
        CHECK(code_of([&] { rev5m_bps(buy, std::vector<TapeTrade>{{kMinute, 99.0, 1.0}}); }) ==
              ErrorCode::NoTapeData);
    }
}

TEST_CASE("filters") {
    const FilterConfig rules;
    auto obs = [](double y, BenchmarkKind k, double x1 = 0.01, double x2 = 10.0,
                  std::optional<double> dur = 30.0) {
        return BenchmarkObservation{y, k, {x1, x2, 25.0, 5.0}, "A", dur};
    };
    CHECK_FALSE(passes_filters(obs(600.0, BenchmarkKind::IS), rules));
    CHECK(passes_filters(obs(499.0, BenchmarkKind::IS), rules));
    CHECK_FALSE(passes_filters(obs(500.0, BenchmarkKind::IS), rules));
    CHECK_FALSE(passes_filters(obs(-150.0, BenchmarkKind::VWAP), rules));
    CHECK_FALSE(passes_filters(obs(150.0, BenchmarkKind::PWP20), rules));
    CHECK_FALSE(passes_filters(obs(200.0, BenchmarkKind::Rev5m), rules));
    CHECK(passes_filters(obs(199.9, BenchmarkKind::Rev5m), rules));
    CHECK(passes_filters(obs(0.0, BenchmarkKind::IS, 0.001, 1.0), rules));
    CHECK(passes_filters(obs(0.0, BenchmarkKind::IS, 0.2, 40.0), rules));
    CHECK_FALSE(passes_filters(obs(0.0, BenchmarkKind::IS, 0.0009), rules));
    CHECK_FALSE(passes_filters(obs(0.0, BenchmarkKind::IS, 0.01, 40.5), rules));
    CHECK_FALSE(passes_filters(obs(0.0, BenchmarkKind::IS, 0.01, 10.0, 5.0), rules));
    CHECK(passes_filters(obs(0.0, BenchmarkKind::IS, 0.01, 10.0, std::nullopt), rules));
    CHECK(apply_filters(std::vector<BenchmarkObservation>{}).empty());

    SUBCASE("idempotent") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> y(-700.0, 700.0), x1(0.0, 0.3), x2(0.0, 50.0), d(0.0, 20.0);
        std::vector<BenchmarkObservation> rows;
        for (int i = 0; i < 2000; ++i)
            rows.push_back(obs(y(rng), kAllKinds[i % 4], x1(rng), x2(rng), d(rng)));
        const auto once = apply_filters(rows, rules);
        const auto twice = apply_filters(once, rules);
        REQUIRE(once.size() == twice.size());
        for (std::size_t i = 0; i < once.size(); ++i) CHECK(once[i].y == twice[i].y);
        CHECK(once.size() < rows.size());
    }
}

TEST_CASE("benchmark properties over random records") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> price(20.0, 200.0), drift(-0.02, 0.02), qty(1.0, 500.0), scale(0.01, 50.0);
    std::uniform_int_distribution<int> nfills(1, 6), ntape(1, 20);

    for (int trial = 0; trial < 300; ++trial) {
        const double p0 = price(rng);
        std::vector<Fill> fills;
        const int nf = nfills(rng);
        for (int i = 0; i < nf; ++i) fills.push_back({(i + 1) * kMinute, p0 * (1.0 + drift(rng)), std::round(qty(rng))});
        auto buy = make_record(Side::Buy, p0 * (1.0 + drift(rng)), fills);
        std::vector<TapeTrade> tape;
        const int nt = ntape(rng);
        for (int i = 0; i < nt; ++i) tape.push_back({i * 45'000, p0 * (1.0 + drift(rng)), std::round(qty(rng))});

        auto sell = buy;
        sell.side = Side::Sell;
        const auto b = compute_benchmarks(buy, tape);
        const auto s = compute_benchmarks(sell, tape);

        const double c = scale(rng);
        auto scaled = buy;
        scaled.arrival_price *= c;
        for (Fill& f : scaled.fills) f.price *= c;
        auto scaled_tape = tape;
        for (TapeTrade& t : scaled_tape) t.price *= c;
        const auto sc = compute_benchmarks(scaled, scaled_tape);

        for (int k = 0; k < 4; ++k) {
            REQUIRE(b.outcomes[k].value.has_value() == s.outcomes[k].value.has_value());
            if (!b.outcomes[k].value) continue;
            CHECK(*s.outcomes[k].value == doctest::Approx(-*b.outcomes[k].value).epsilon(1e-12));
            REQUIRE(sc.outcomes[k].value.has_value());
            CHECK(std::abs(*sc.outcomes[k].value - *b.outcomes[k].value) <=
                  1e-9 * std::max(1.0, std::abs(*b.outcomes[k].value)));
        }

        double total = 0.0;
        for (const TapeTrade& t : tape) total += t.volume;
        const PwpResult pwp = pwp_bps(buy, tape);
        CHECK(pwp.window_volume == doctest::Approx(std::min(buy.size_shares / 0.2, total)).epsilon(1e-14));
    }
}

TEST_CASE("compute_benchmarks keeps errors per benchmark") {
    const auto buy = make_record(Side::Buy, 100.0, {{kMinute, 100.0, 100.0}});
    const auto out = compute_benchmarks(buy, std::vector<TapeTrade>{});
    REQUIRE(out.outcome(BenchmarkKind::IS).value);
    for (BenchmarkKind k : {BenchmarkKind::VWAP, BenchmarkKind::PWP20, BenchmarkKind::Rev5m}) {
        CHECK_FALSE(out.outcome(k).value);
        CHECK(out.outcome(k).error == "NoTapeData");
    }
    const auto rows = to_observations(std::vector<OrderBenchmarks>{out});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].kind == BenchmarkKind::IS);
    CHECK(rows[0].x.x1 == doctest::Approx(0.01));
    CHECK(*rows[0].duration_min == doctest::Approx(10.0));
}

TEST_CASE("record validation") {
    auto r = make_record(Side::Buy, 100.0, {{kMinute, 100.0, 100.0}});
    CHECK_NOTHROW(validate(r));
    auto partial = r;
    partial.size_shares = 150.0;
    CHECK(code_of([&] { validate(partial); }) == ErrorCode::InvalidInput);
    auto backwards = r;
    backwards.end_time = backwards.start_time;
    CHECK(code_of([&] { validate(backwards); }) == ErrorCode::InvalidInput);
    auto nofills = r;
    nofills.fills.clear();
    CHECK(code_of([&] { validate(nofills); }) == ErrorCode::EmptyFills);
    auto negative = r;
    negative.spread_bps = 0.0;
    CHECK(code_of([&] { validate(negative); }) == ErrorCode::InvalidInput);
}

namespace {

OrderBenchmarks order_with(double rho, std::array<double, 4> values) {
    OrderBenchmarks o;
    o.x = {0.01, rho, 20.0, 5.0};
    for (int k = 0; k < 4; ++k) o.outcomes[k].value = values[k];
    return o;
}

}  // namespace

TEST_CASE("correlation matrices") {
    const std::vector<OrderBenchmarks> orders{order_with(2.0, {1, 2, 4, 1}), order_with(3.0, {2, 4, 3, 3}),
                                              order_with(5.0, {3, 6, 2, 2}), order_with(6.9, {4, 8, 1, 5})};
    const std::vector<ParticipationBucket> one{{1.0, 7.0}};
    const auto m = correlation_matrices(orders, one);
    REQUIRE(m.size() == 1);
    CHECK(m[0].n_orders == 4);
    for (int i = 0; i < 4; ++i) CHECK(m[0].matrix[i][i] == 1.0);
    CHECK(m[0].matrix[0][1] == doctest::Approx(1.0));
    CHECK(m[0].matrix[0][2] == doctest::Approx(-1.0));
    CHECK(m[0].matrix[0][3] == doctest::Approx(0.8315218406202999).epsilon(1e-14));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(m[0].matrix[i][j] == m[0].matrix[j][i]);
            CHECK(std::abs(m[0].matrix[i][j]) <= 1.0);
        }

    SUBCASE("too few orders in a bucket") {
        const std::vector<ParticipationBucket> two{{1.0, 7.0}, {7.0, 15.0}};
        CHECK(code_of([&] { correlation_matrices(orders, two); }) == ErrorCode::BucketTooSmall);
    }
    SUBCASE("incomplete orders are skipped") {
        auto partial = orders;
        partial[0].outcomes[3].value.reset();
        CHECK(correlation_matrices(partial, one)[0].n_orders == 3);
    }
    SUBCASE("last bucket includes its upper edge") {
        const std::vector<OrderBenchmarks> edge{order_with(40.0, {1, 2, 3, 4}), order_with(30.0, {2, 1, 3, 3}),
                                                order_with(25.0, {3, 3, 1, 2})};
        const std::vector<ParticipationBucket> last{{25.0, 40.0}};
        CHECK(correlation_matrices(edge, last)[0].n_orders == 3);
        const std::vector<ParticipationBucket> not_last{{25.0, 40.0}, {40.0, 50.0}};
        CHECK(code_of([&] { correlation_matrices(edge, not_last); }) == ErrorCode::BucketTooSmall);
    }
}

TEST_CASE("pearson of a constant column is zero") {
    const std::vector<double> a{1, 2, 3}, b{5, 5, 5};
    CHECK(pearson(a, b) == 0.0);
}
