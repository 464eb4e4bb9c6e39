#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fideq {

enum class ErrorKind {
    DimensionMismatch,
    NotNormalized,
    ZeroState,
    ZeroMatrix,
    NotUnitary,
    NonFinite,
    InvalidLambda,
    InvalidTolerance,
    InvalidParams,
    Numerical,
    Parse,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::ZeroState: return "ZeroState";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::InvalidLambda: return "InvalidLambda";
    case ErrorKind::InvalidTolerance: return "InvalidTolerance";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::Numerical: return "Numerical";
    case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace fideq
