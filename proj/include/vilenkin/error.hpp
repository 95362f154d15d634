#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vilenkin {

enum class ErrorCode {
    NotSquare,
    Singular,
    UnitDeterminant,
    NotExpanding,
    WrongCount,
    MissingZeroDigit,
    CongruentDigits,
    InternalInconsistency,
    SideMismatch,
    ContextMismatch,
    IndexOverflow,
    TooLarge,
    BadLength,
    InvalidShape,
    CoarseningRequested,
    ShapeIncompatible,
    InvalidParameters,
    ZeroDigitUsed,
    WindowCollision,
    InvalidPhase,
    NonTerminatingProduct,
    NotOrthogonal,
    NotUnitNorm,
    MaskNotOrthogonal,
    OrderMismatch,
    ConfigError,
    ArtifactError,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::UnitDeterminant: return "UnitDeterminant";
    case ErrorCode::NotExpanding: return "NotExpanding";
    case ErrorCode::WrongCount: return "WrongCount";
    case ErrorCode::MissingZeroDigit: return "MissingZeroDigit";
    case ErrorCode::CongruentDigits: return "CongruentDigits";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::SideMismatch: return "SideMismatch";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::IndexOverflow: return "IndexOverflow";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::CoarseningRequested: return "CoarseningRequested";
    case ErrorCode::ShapeIncompatible: return "ShapeIncompatible";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::ZeroDigitUsed: return "ZeroDigitUsed";
    case ErrorCode::WindowCollision: return "WindowCollision";
    case ErrorCode::InvalidPhase: return "InvalidPhase";
    case ErrorCode::NonTerminatingProduct: return "NonTerminatingProduct";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NotUnitNorm: return "NotUnitNorm";
    case ErrorCode::MaskNotOrthogonal: return "MaskNotOrthogonal";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ArtifactError: return "ArtifactError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// message starts with the code name so reports can be grepped.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace vilenkin
