#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tca/types.hpp"

namespace tca {

using EpochMs = std::int64_t;

struct Fill {
    EpochMs timestamp = 0;
    double price = 0.0;
    double quantity = 0.0;
};

struct TapeTrade {
    EpochMs timestamp = 0;
    double price = 0.0;
    double volume = 0.0;
};

enum class Side : int { Buy = 1, Sell = -1 };

inline double sign(Side s) { return static_cast<double>(static_cast<int>(s)); }

// One fully completed parent placement.
struct ExecutionRecord {
    std::string order_id;
    std::string algo_id;
    Side side = Side::Buy;
    double arrival_price = 0.0;
    EpochMs start_time = 0;
    EpochMs end_time = 0;
    std::vector<Fill> fills;
    double size_shares = 0.0;
    double adv_shares = 0.0;
    double participation_rate_pct = 0.0;
    double volatility_pct = 0.0;
    double spread_bps = 0.0;

    Covariates covariates() const;
    double duration_minutes() const;
};

// Throws Error(InvalidInput) when a record breaks its invariants (timing,
// non-positive covariates, fill quantities not summing to the order size).
void validate(const ExecutionRecord& record);

/// Quantity-weighted mean fill price.
double average_execution_price(std::span<const Fill> fills);

double is_bps(const ExecutionRecord& record);

/// Execution price against the tape VWAP over [start_time, end_time].
double vwap_bps(const ExecutionRecord& record, std::span<const TapeTrade> tape);

struct PwpResult {
    double bps = 0.0;
    double window_price = 0.0;
    double window_volume = 0.0;
    // True when the tape ran out before the participation threshold was reached.
    bool partial = false;
};

/// Participation-weighted price benchmark. The tape window starts at the
/// order start and runs until cumulative tape volume reaches
/// size / (target_rate / 100); the trade crossing the threshold contributes
/// only the shares needed to reach it.
PwpResult pwp_bps(const ExecutionRecord& record, std::span<const TapeTrade> tape,
                  double target_rate_pct = 20.0);

inline constexpr EpochMs kReversionWindowMs = 300'000;

/// Post-trade reversion: tape VWAP over (last_fill, last_fill + 5 min] against
/// the last fill price.
double rev5m_bps(const ExecutionRecord& record, std::span<const TapeTrade> tape);

struct FilterConfig {
    double min_duration_min = 5.0;  // strict: duration > min
    double min_x1 = 0.001;
    double max_x1 = 0.2;
    double min_x2 = 1.0;
    double max_x2 = 40.0;
    // Strict |y| < cutoff, indexed by BenchmarkKind.
    std::array<double, 4> cutoff_bps = {500.0, 150.0, 150.0, 200.0};

    double cutoff(BenchmarkKind kind) const { return cutoff_bps[static_cast<int>(kind)]; }
};

bool passes_filters(const BenchmarkObservation& obs, const FilterConfig& rules);

std::vector<BenchmarkObservation> apply_filters(std::span<const BenchmarkObservation> observations,
                                                const FilterConfig& rules = {});

// Per-benchmark outcome for one order. A missing value carries the error that
// prevented it (e.g. NoTapeData) so one order can yield IS without Rev5m.
struct BenchmarkOutcome {
    std::optional<double> value;
    std::string error;
    bool partial = false;
};

struct OrderBenchmarks {
    std::string order_id;
    std::string algo_id;
    Covariates x;
    double duration_min = 0.0;
    std::array<BenchmarkOutcome, 4> outcomes;  // indexed by BenchmarkKind

    const BenchmarkOutcome& outcome(BenchmarkKind kind) const {
        return outcomes[static_cast<int>(kind)];
    }
};

/// Evaluates all four benchmarks for one record; tape must be sorted by time.
OrderBenchmarks compute_benchmarks(const ExecutionRecord& record, std::span<const TapeTrade> tape);

/// Flattens available outcomes into regression rows (before filtering).
std::vector<BenchmarkObservation> to_observations(std::span<const OrderBenchmarks> orders);

struct ParticipationBucket {
    double lo_pct = 0.0;
    double hi_pct = 0.0;
    // Buckets are [lo, hi); the last bucket of a list also includes hi.
};

std::vector<ParticipationBucket> default_buckets();

using Matrix4 = std::array<std::array<double, 4>, 4>;

struct BucketCorrelation {
    ParticipationBucket bucket;
    std::size_t n_orders = 0;
    Matrix4 matrix{};
};

/// Pearson correlation of (IS, VWAP, PWP20, Rev5m) per participation bucket.
/// Only orders with all four benchmarks available contribute. Throws
/// Error(BucketTooSmall) if a bucket ends up with fewer than 3 orders.
std::vector<BucketCorrelation> correlation_matrices(std::span<const OrderBenchmarks> orders,
                                                    std::span<const ParticipationBucket> buckets);

/// Plain Pearson correlation of equally sized columns; 0 when either column is
/// constant.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace tca
