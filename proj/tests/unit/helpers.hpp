#pragma once

#include <string>
#include <vector>

#include "tca/benchmark_engine.hpp"

namespace tca::test {

inline constexpr EpochMs kMinute = 60'000;

// A fully specified order starting at t = 0 and lasting ten minutes.
inline ExecutionRecord make_record(Side side, double arrival, std::vector<Fill> fills) {
    ExecutionRecord r;
    r.order_id = "T1";
    r.algo_id = "ALG";
    r.side = side;
    r.arrival_price = arrival;
    r.start_time = 0;
    r.end_time = 10 * kMinute;
    double size = 0.0;
    for (const Fill& f : fills) size += f.quantity;
    r.fills = std::move(fills);
    r.size_shares = size;
    r.adv_shares = size * 100.0;
    r.participation_rate_pct = 10.0;
    r.volatility_pct = 25.0;
    r.spread_bps = 5.0;
    return r;
}

}  // namespace tca::test
