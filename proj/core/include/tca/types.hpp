#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace tca {

enum class BenchmarkKind { IS = 0, VWAP = 1, PWP20 = 2, Rev5m = 3 };

inline constexpr std::array<BenchmarkKind, 4> kAllKinds = {
    BenchmarkKind::IS, BenchmarkKind::VWAP, BenchmarkKind::PWP20, BenchmarkKind::Rev5m};

std::string_view to_string(BenchmarkKind kind);

// Throws Error(InvalidInput) on an unknown name.
BenchmarkKind parse_kind(std::string_view name);

// Order/stock covariates in their modelling units:
//   x1 = Size/ADV as a fraction, x2 = participation rate in percent,
//   x3 = annualized volatility in percent, x4 = spread in bps.
struct Covariates {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
    double x4 = 0.0;
};

// One regression row. duration_min is only known when the row was built from
// execution data; synthetic rows leave it empty and skip the duration filter.
struct BenchmarkObservation {
    double y = 0.0;  // bps
    BenchmarkKind kind = BenchmarkKind::IS;
    Covariates x;
    std::string algo_id;
    std::optional<double> duration_min;
};

}  // namespace tca
