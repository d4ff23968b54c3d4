#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nids {

enum class ErrorCode {
    // dataset
    FieldCountMismatch,
    NumericParseError,
    UnknownLabel,
    UnknownCategory,
    CountExceedsPopulation,
    MissingLabels,
    // preprocess
    EmptyDataset,
    DimensionMismatch,
    // clustering
    InvalidClusterCount,
    EmptyClusterEncountered,
    NonFiniteData,
    EmptyCluster,
    // labeling
    InvalidAlpha,
    ClusterMismatch,
    // eval
    RowMismatch,
    EmptyEvaluation,
    // pipeline
    ConfigInvalid,
    DataError,
    InvariantViolation,
};

std::string_view to_string(ErrorCode code);

/// Broad class of a failure, used by the CLI to pick an exit status.
enum class ErrorClass { Config, Data, Internal };

ErrorClass classify(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nids
