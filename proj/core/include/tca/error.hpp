#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tca {

enum class ErrorCode {
    EmptyFills,
    InvalidPrice,
    NoTapeData,
    BucketTooSmall,
    InvalidInput,
    InvalidCovariate,
    SpecMismatch,
    InsufficientSamples,
    DivergentChain,
    DegenerateDistribution,
    CannotStandardize,
    InsufficientHistory,
    ConfigError,
    DataError,
};

std::string_view to_string(ErrorCode code);

// Library-wide exception. Every failure path named in the public API throws
// this with the matching code so callers (the CLI in particular) can map it
// to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tca
