#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tca/benchmark_engine.hpp"
#include "tca/cost_estimator.hpp"
#include "tca/error.hpp"
#include "tca/model.hpp"
#include "tca/posterior.hpp"
#include "tca/ranking.hpp"
#include "tca/sampler.hpp"
#include "tca/synth.hpp"

// File formats shared by the library and the command line tool. Parsing
// failures throw Error(DataError) for data files and Error(ConfigError) for
// configuration files.
namespace tca::io {

/// "2024-03-05T14:30:00Z", optional fractional seconds and "+00:00" suffix.
EpochMs parse_timestamp(std::string_view text);
std::string format_timestamp(EpochMs ms);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

struct RejectedRow {
    std::size_t line = 0;
    std::string reason;
    std::string raw;
};

// ---- executions / tape ----------------------------------------------------

struct ExecutionsFile {
    std::vector<ExecutionRecord> records;  // in first-appearance order
    std::vector<std::string> symbols;      // per record; empty if no symbol column
    std::vector<RejectedRow> rejected;
};

/// One row per fill with columns order_id, algo_id, side, arrival_price,
/// start_time, end_time, fill_time, fill_price, fill_qty, size_shares,
/// adv_shares, participation_rate_pct, volatility_pct, spread_bps and an
/// optional symbol. side is BUY/SELL (or B/S, 1/-1). Malformed rows are
/// rejected with their line number; orders failing validation are rejected
/// as a whole.
ExecutionsFile read_executions_csv(std::istream& in);

struct TapeFile {
    std::vector<std::string> symbols;            // sorted
    std::vector<std::vector<TapeTrade>> trades;  // per symbol, sorted by time
    std::vector<RejectedRow> rejected;

    const std::vector<TapeTrade>* find(std::string_view symbol) const;
};

/// Columns symbol, timestamp, price, volume.
TapeFile read_tape_csv(std::istream& in);

void write_rejects_csv(std::ostream& out, const std::vector<RejectedRow>& rows);

// ---- observations -----------------------------------------------------------

/// Header "y,kind,x1,x2,x3,x4,algo_id".
void write_observations_csv(std::ostream& out, const std::vector<BenchmarkObservation>& rows);
std::vector<BenchmarkObservation> read_observations_csv(std::istream& in);

// ---- JSON documents (returned/accepted as text) -------------------------------

std::string correlations_json(const std::vector<BucketCorrelation>& buckets);

FilterConfig parse_filter_config(std::string_view json_text);
std::string filter_config_json(const FilterConfig& config);

PriorSpec parse_prior_spec(std::string_view json_text);
std::string prior_spec_json(const PriorSpec& prior);

struct FitConfig {
    ModelSpec model;
    ChainConfig chain;
};

/// {"model": {"kind": "IS", "prior": [...]?}, "chain": {...}?}; a missing
/// prior means the default prior, a missing chain block the desk config.
FitConfig parse_fit_config(std::string_view json_text);
std::string fit_config_json(const FitConfig& config);

ChainConfig parse_chain_config(std::string_view json_text);
std::string chain_config_json(const ChainConfig& config);

synth::SynthConfig parse_synth_config(std::string_view json_text);
std::string synth_config_json(const synth::SynthConfig& config);

RankingWeights parse_weights(std::string_view json_text);
std::string weights_json(const RankingWeights& weights);

struct Scenario {
    std::optional<BenchmarkKind> kind;
    Covariates x;
    std::string algo_id;
};

/// JSON list of {kind, x1, x2, x3, x4, algo_id}; kind and algo_id optional.
std::vector<Scenario> parse_scenarios(std::string_view json_text);

// ---- posterior artifacts ------------------------------------------------------

/// Columnar CSV: "chain" then one column per coefficient, one row per draw.
void write_posterior_csv(std::ostream& out, const PosteriorSamples& samples);

/// Summary with kind, algorithms, chain count, acceptance and per-coefficient
/// mean/std/rhat/ess.
std::string posterior_summary_json(const PosteriorSamples& samples);

/// Rebuilds PosteriorSamples from the CSV and its summary JSON.
PosteriorSamples read_posterior(std::istream& csv, std::string_view summary_json_text);

// ---- cost and ranking outputs -------------------------------------------------

struct CostReport {
    Scenario scenario;
    BenchmarkKind kind = BenchmarkKind::IS;
    CostPosterior cost;
    Histogram histogram;
};

std::string cost_reports_json(const std::vector<CostReport>& reports, bool include_draws);

std::string profiles_json(const std::vector<HistoricalProfile>& profiles);
std::vector<HistoricalProfile> parse_profiles(std::string_view json_text);

std::string scorecards_json(const std::vector<ScoreCard>& cards, const std::string& wheel_choice);
void write_ranking_csv(std::ostream& out, const std::vector<ScoreCard>& cards);

// ---- helpers ------------------------------------------------------------------

std::string read_file(const std::string& path, ErrorCode missing = ErrorCode::DataError);
void write_file(const std::string& path, std::string_view contents);

}  // namespace tca::io
