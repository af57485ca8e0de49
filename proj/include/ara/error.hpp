#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ara {

enum class ErrorCode {
    // textmetrics
    EmptyText,
    UnsupportedLanguage,
    // formulas
    DegenerateStats,
    NonArabicInput,
    // prompting / datasets
    UnknownDataset,
    MalformedRecord,
    RatingOutOfScale,
    DuplicateId,
    // scoring
    MissingAnswerMarker,
    MissingConfidenceMarker,
    NonIntegerScore,
    TopTokenNotNumeric,
    // providers
    TransportError,
    AuthError,
    ContextLengthExceeded,
    LogprobsUnsupported,
    TokenNotInVocabulary,
    CacheCorrupt,
    ReplayMiss,
    // rsrs
    EmptySentence,
    DimensionMismatch,
    // ensemble
    ZeroVariance,
    DegenerateRange,
    // evaluation
    ConstantSeries,
    DegenerateCorrelationMatrix,
    // generic
    PreconditionViolation,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code so
/// callers (and the pipeline's failure accounting) can dispatch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        raise(ErrorCode::PreconditionViolation, message);
    }
}

} // namespace ara
