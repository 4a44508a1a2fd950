#ifndef XIDPS_ERRORS_HPP
#define XIDPS_ERRORS_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace xidps {

enum class ErrorCode {
    MissingColumn,
    ArityMismatch,
    UnparseableNumber,
    EmptyTable,
    SchemaMismatch,
    ClassTooSmall,
    UnknownClass,
    DegenerateData,
    RoundsZero,
    SubsetTooLarge,
    ShapeMismatch,
    KOutOfRange,
    EmptyData,
    EmptyMatrix,
    UnorderedFeed,
    EncodingError,
    ConfigError,
    MissingArtifact,
    IoError,
};

const char* error_code_name(ErrorCode code);

// Validation failures carry a code plus, where it helps, the offending row.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
    Error(ErrorCode code, const std::string& what, std::size_t row)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what +
                             " (row " + std::to_string(row) + ")"),
          code_(code),
          row_(row) {}

    ErrorCode code() const { return code_; }
    std::optional<std::size_t> row() const { return row_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> row_;
};

}  // namespace xidps

#endif  // XIDPS_ERRORS_HPP
