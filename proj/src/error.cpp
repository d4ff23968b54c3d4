#include "nids/error.hpp"

namespace nids {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::FieldCountMismatch: return "FieldCountMismatch";
        case ErrorCode::NumericParseError: return "NumericParseError";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::UnknownCategory: return "UnknownCategory";
        case ErrorCode::CountExceedsPopulation: return "CountExceedsPopulation";
        case ErrorCode::MissingLabels: return "MissingLabels";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidClusterCount: return "InvalidClusterCount";
        case ErrorCode::EmptyClusterEncountered: return "EmptyClusterEncountered";
        case ErrorCode::NonFiniteData: return "NonFiniteData";
        case ErrorCode::EmptyCluster: return "EmptyCluster";
        case ErrorCode::InvalidAlpha: return "InvalidAlpha";
        case ErrorCode::ClusterMismatch: return "ClusterMismatch";
        case ErrorCode::RowMismatch: return "RowMismatch";
        case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::DataError: return "DataError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

ErrorClass classify(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidClusterCount:
        case ErrorCode::InvalidAlpha:
        case ErrorCode::ConfigInvalid:
            return ErrorClass::Config;
        case ErrorCode::EmptyClusterEncountered:
        case ErrorCode::ClusterMismatch:
        case ErrorCode::InvariantViolation:
            return ErrorClass::Internal;
        default:
            return ErrorClass::Data;
    }
}

}  // namespace nids
