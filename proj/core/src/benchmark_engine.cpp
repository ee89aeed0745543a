#include "tca/benchmark_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tca/error.hpp"

namespace tca {

namespace {

double relative_bps(double reference, double execution, Side side) {
    if (!(execution > 0.0) || !std::isfinite(execution))
        throw Error(ErrorCode::InvalidPrice, "average execution price must be positive");
    if (!(reference > 0.0) || !std::isfinite(reference))
        throw Error(ErrorCode::InvalidPrice, "reference price must be positive");
    return (reference - execution) / execution * sign(side) * 10000.0;
}

struct WeightedPrice {
    double notional = 0.0;
    double volume = 0.0;

    void add(double price, double qty) {
        notional += price * qty;
        volume += qty;
    }
    double price() const { return notional / volume; }
};

// Trades with lo <= t <= hi (or lo < t when open_lo), on a time-sorted tape.
WeightedPrice tape_vwap(std::span<const TapeTrade> tape, EpochMs lo, EpochMs hi, bool open_lo) {
    auto first = open_lo ? std::upper_bound(tape.begin(), tape.end(), lo,
                                            [](EpochMs t, const TapeTrade& tr) { return t < tr.timestamp; })
                         : std::lower_bound(tape.begin(), tape.end(), lo,
                                            [](const TapeTrade& tr, EpochMs t) { return tr.timestamp < t; });
    WeightedPrice acc;
    for (auto it = first; it != tape.end() && it->timestamp <= hi; ++it) acc.add(it->price, it->volume);
    return acc;
}

}  // namespace

Covariates ExecutionRecord::covariates() const {
    return Covariates{size_shares / adv_shares, participation_rate_pct, volatility_pct, spread_bps};
}

double ExecutionRecord::duration_minutes() const {
    return static_cast<double>(end_time - start_time) / 60000.0;
}

void validate(const ExecutionRecord& record) {
    if (record.end_time <= record.start_time)
        throw Error(ErrorCode::InvalidInput, "order " + record.order_id + ": end_time must follow start_time");
    if (record.fills.empty()) throw Error(ErrorCode::EmptyFills, "order " + record.order_id + " has no fills");
    const double covs[] = {record.size_shares, record.adv_shares, record.participation_rate_pct,
                           record.volatility_pct, record.spread_bps};
    for (double c : covs)
        if (!(c > 0.0) || !std::isfinite(c))
            throw Error(ErrorCode::InvalidInput, "order " + record.order_id + ": covariates must be positive");
    double filled = 0.0;
    for (const Fill& f : record.fills) {
        if (!(f.price > 0.0) || !(f.quantity > 0.0))
            throw Error(ErrorCode::InvalidInput, "order " + record.order_id + ": fill price/quantity must be positive");
        filled += f.quantity;
    }
    if (std::abs(filled - record.size_shares) > 1e-9 * record.size_shares)
        throw Error(ErrorCode::InvalidInput, "order " + record.order_id + " is not fully completed");
}

double average_execution_price(std::span<const Fill> fills) {
    if (fills.empty()) throw Error(ErrorCode::EmptyFills, "no fills");
    WeightedPrice acc;
    for (const Fill& f : fills) acc.add(f.price, f.quantity);
    if (!(acc.volume > 0.0)) throw Error(ErrorCode::InvalidPrice, "total fill quantity must be positive");
    return acc.price();
}

double is_bps(const ExecutionRecord& record) {
    return relative_bps(record.arrival_price, average_execution_price(record.fills), record.side);
}

double vwap_bps(const ExecutionRecord& record, std::span<const TapeTrade> tape) {
    const WeightedPrice window = tape_vwap(tape, record.start_time, record.end_time, false);
    if (!(window.volume > 0.0))
        throw Error(ErrorCode::NoTapeData, "no tape trades during order " + record.order_id);
    return relative_bps(window.price(), average_execution_price(record.fills), record.side);
}

PwpResult pwp_bps(const ExecutionRecord& record, std::span<const TapeTrade> tape, double target_rate_pct) {
    if (!(target_rate_pct > 0.0) || target_rate_pct > 100.0)
        throw Error(ErrorCode::InvalidInput, "target participation rate must be in (0, 100]");
    const double threshold = record.size_shares / (target_rate_pct / 100.0);

    auto it = std::lower_bound(tape.begin(), tape.end(), record.start_time,
                               [](const TapeTrade& tr, EpochMs t) { return tr.timestamp < t; });
    WeightedPrice acc;
    for (; it != tape.end() && acc.volume < threshold; ++it) {
        const double take = std::min(it->volume, threshold - acc.volume);
        acc.add(it->price, take);
    }
    if (!(acc.volume > 0.0))
        throw Error(ErrorCode::NoTapeData, "no tape trades after start of order " + record.order_id);

    PwpResult result;
    result.window_price = acc.price();
    result.window_volume = acc.volume;
    result.partial = acc.volume < threshold;
    result.bps = relative_bps(result.window_price, average_execution_price(record.fills), record.side);
    return result;
}

double rev5m_bps(const ExecutionRecord& record, std::span<const TapeTrade> tape) {
    if (record.fills.empty()) throw Error(ErrorCode::EmptyFills, "no fills");
    // Last fill by timestamp; the later entry wins a timestamp tie.
    const Fill* last = &record.fills.front();
    for (const Fill& f : record.fills)
        if (f.timestamp >= last->timestamp) last = &f;
    const WeightedPrice window = tape_vwap(tape, last->timestamp, last->timestamp + kReversionWindowMs, true);
    if (!(window.volume > 0.0))
        throw Error(ErrorCode::NoTapeData, "no tape trades after last fill of order " + record.order_id);
    if (!(last->price > 0.0)) throw Error(ErrorCode::InvalidPrice, "last fill price must be positive");
    return (window.price() - last->price) / last->price * sign(record.side) * 10000.0;
}

bool passes_filters(const BenchmarkObservation& obs, const FilterConfig& rules) {
    if (obs.duration_min && !(*obs.duration_min > rules.min_duration_min)) return false;
    if (!(obs.x.x1 >= rules.min_x1 && obs.x.x1 <= rules.max_x1)) return false;
    if (!(obs.x.x2 >= rules.min_x2 && obs.x.x2 <= rules.max_x2)) return false;
    return std::abs(obs.y) < rules.cutoff(obs.kind);
}

std::vector<BenchmarkObservation> apply_filters(std::span<const BenchmarkObservation> observations,
                                                const FilterConfig& rules) {
    std::vector<BenchmarkObservation> kept;
    kept.reserve(observations.size());
    std::copy_if(observations.begin(), observations.end(), std::back_inserter(kept),
                 [&](const BenchmarkObservation& o) { return passes_filters(o, rules); });
    return kept;
}

OrderBenchmarks compute_benchmarks(const ExecutionRecord& record, std::span<const TapeTrade> tape) {
    OrderBenchmarks out;
    out.order_id = record.order_id;
    out.algo_id = record.algo_id;
    out.x = record.covariates();
    out.duration_min = record.duration_minutes();

    auto attempt = [&](BenchmarkKind kind, auto&& fn) {
        BenchmarkOutcome& slot = out.outcomes[static_cast<int>(kind)];
        try {
            fn(slot);
        } catch (const Error& e) {
            slot.value.reset();
            slot.error = std::string(to_string(e.code()));
        }
    };
    attempt(BenchmarkKind::IS, [&](BenchmarkOutcome& s) { s.value = is_bps(record); });
    attempt(BenchmarkKind::VWAP, [&](BenchmarkOutcome& s) { s.value = vwap_bps(record, tape); });
    attempt(BenchmarkKind::PWP20, [&](BenchmarkOutcome& s) {
        const PwpResult r = pwp_bps(record, tape);
        s.value = r.bps;
        s.partial = r.partial;
    });
    attempt(BenchmarkKind::Rev5m, [&](BenchmarkOutcome& s) { s.value = rev5m_bps(record, tape); });
    return out;
}

std::vector<BenchmarkObservation> to_observations(std::span<const OrderBenchmarks> orders) {
    std::vector<BenchmarkObservation> rows;
    for (const OrderBenchmarks& order : orders) {
        for (BenchmarkKind kind : kAllKinds) {
            const BenchmarkOutcome& o = order.outcome(kind);
            if (!o.value) continue;
            rows.push_back(BenchmarkObservation{*o.value, kind, order.x, order.algo_id, order.duration_min});
        }
    }
    return rows;
}

std::vector<ParticipationBucket> default_buckets() {
    return {{1.0, 7.0}, {7.0, 15.0}, {15.0, 25.0}, {25.0, 40.0}};
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n != b.size() || n == 0) throw Error(ErrorCode::InvalidInput, "pearson: columns must be equal and non-empty");
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<BucketCorrelation> correlation_matrices(std::span<const OrderBenchmarks> orders,
                                                    std::span<const ParticipationBucket> buckets) {
    std::vector<BucketCorrelation> result;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        const ParticipationBucket& bucket = buckets[b];
        const bool last = b + 1 == buckets.size();
        std::array<std::vector<double>, 4> columns;
        for (const OrderBenchmarks& order : orders) {
            const double rho = order.x.x2;
            const bool inside = rho >= bucket.lo_pct && (rho < bucket.hi_pct || (last && rho == bucket.hi_pct));
            if (!inside) continue;
            const bool complete = std::all_of(order.outcomes.begin(), order.outcomes.end(),
                                              [](const BenchmarkOutcome& o) { return o.value.has_value(); });
            if (!complete) continue;
            for (int k = 0; k < 4; ++k) columns[k].push_back(*order.outcomes[k].value);
        }
        const std::size_t n = columns[0].size();
        if (n < 3)
            throw Error(ErrorCode::BucketTooSmall, "participation bucket [" + std::to_string(bucket.lo_pct) + ", " +
                                                       std::to_string(bucket.hi_pct) + ") has " +
                                                       std::to_string(n) + " complete orders");
        BucketCorrelation bc;
        bc.bucket = bucket;
        bc.n_orders = n;
        for (int i = 0; i < 4; ++i) {
            bc.matrix[i][i] = 1.0;
            for (int j = i + 1; j < 4; ++j) {
                const double r = pearson(columns[i], columns[j]);
                bc.matrix[i][j] = r;
                bc.matrix[j][i] = r;
            }
        }
        result.push_back(bc);
    }
    return result;
}

}  // namespace tca
