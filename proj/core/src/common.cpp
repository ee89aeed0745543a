#include "tca/error.hpp"
#include "tca/types.hpp"

namespace tca {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyFills: return "EmptyFills";
        case ErrorCode::InvalidPrice: return "InvalidPrice";
        case ErrorCode::NoTapeData: return "NoTapeData";
        case ErrorCode::BucketTooSmall: return "BucketTooSmall";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::InvalidCovariate: return "InvalidCovariate";
        case ErrorCode::SpecMismatch: return "SpecMismatch";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::DivergentChain: return "DivergentChain";
        case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
        case ErrorCode::CannotStandardize: return "CannotStandardize";
        case ErrorCode::InsufficientHistory: return "InsufficientHistory";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::DataError: return "DataError";
    }
    return "Unknown";
}

std::string_view to_string(BenchmarkKind kind) {
    switch (kind) {
        case BenchmarkKind::IS: return "IS";
        case BenchmarkKind::VWAP: return "VWAP";
        case BenchmarkKind::PWP20: return "PWP20";
        case BenchmarkKind::Rev5m: return "Rev5m";
    }
    return "?";
}

BenchmarkKind parse_kind(std::string_view name) {
    for (BenchmarkKind k : kAllKinds)
        if (to_string(k) == name) return k;
    throw Error(ErrorCode::InvalidInput, "unknown benchmark kind '" + std::string(name) + "'");
}

}  // namespace tca
