#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tca/benchmark_engine.hpp"
#include "tca/error.hpp"

namespace tca::app {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kDataError = 3, kDivergence = 4 };

int exit_code(ErrorCode code);

/// Runs one command line (argv[0] is the program name). Output files go to
/// --out-dir; progress and warnings go to `log`.
int run(std::span<const std::string> args, std::ostream& log);
int run(int argc, const char* const* argv, std::ostream& log);

/// Per-order benchmark table written by `benchmarks` and read by
/// `correlations`: one row per order, empty cells for unavailable values.
void write_order_benchmarks_csv(std::ostream& out, std::span<const OrderBenchmarks> orders);
std::vector<OrderBenchmarks> read_order_benchmarks_csv(std::istream& in);

/// "1-7,7-15,15-25,25-40" style bucket list.
std::vector<ParticipationBucket> parse_buckets(const std::string& text);

}  // namespace tca::app
