#include "xidps/errors.hpp"

namespace xidps {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::UnparseableNumber: return "UnparseableNumber";
        case ErrorCode::EmptyTable: return "EmptyTable";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::ClassTooSmall: return "ClassTooSmall";
        case ErrorCode::UnknownClass: return "UnknownClass";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::RoundsZero: return "RoundsZero";
        case ErrorCode::SubsetTooLarge: return "SubsetTooLarge";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::KOutOfRange: return "KOutOfRange";
        case ErrorCode::EmptyData: return "EmptyData";
        case ErrorCode::EmptyMatrix: return "EmptyMatrix";
        case ErrorCode::UnorderedFeed: return "UnorderedFeed";
        case ErrorCode::EncodingError: return "EncodingError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::MissingArtifact: return "MissingArtifact";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace xidps
