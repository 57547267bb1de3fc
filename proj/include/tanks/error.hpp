#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tanks {

enum class ErrorKind {
    // input validation
    DimensionMismatch,
    NegativeEntry,
    SelfDebt,
    SyntaxError,
    SchemaError,
    InvalidParams,
    // kernel preconditions
    EmptySet,
    IndexOutOfRange,
    NegativeInput,
    OutOfRange,
    // solver failures
    SingularSystem,
    NotErgodic,
    ZeroDebtInSwamp,
    NonTransientZeroGroup,
    Stalled,
    InvariantViolation,
    NoConvergence,
    VerificationFailed,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NegativeEntry: return "NegativeEntry";
        case ErrorKind::SelfDebt: return "SelfDebt";
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::EmptySet: return "EmptySet";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::NegativeInput: return "NegativeInput";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::NotErgodic: return "NotErgodic";
        case ErrorKind::ZeroDebtInSwamp: return "ZeroDebtInSwamp";
        case ErrorKind::NonTransientZeroGroup: return "NonTransientZeroGroup";
        case ErrorKind::Stalled: return "Stalled";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::VerificationFailed: return "VerificationFailed";
    }
    return "Unknown";
}

/// True for errors caused by bad input data or configuration (CLI exit code 2).
constexpr bool is_validation_error(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch:
        case ErrorKind::NegativeEntry:
        case ErrorKind::SelfDebt:
        case ErrorKind::SyntaxError:
        case ErrorKind::SchemaError:
        case ErrorKind::InvalidParams:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace tanks
