#include "ara/error.hpp"
#include "ara/language.hpp"

namespace ara {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::UnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorCode::DegenerateStats: return "DegenerateStats";
    case ErrorCode::NonArabicInput: return "NonArabicInput";
    case ErrorCode::UnknownDataset: return "UnknownDataset";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::RatingOutOfScale: return "RatingOutOfScale";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingAnswerMarker: return "MissingAnswerMarker";
    case ErrorCode::MissingConfidenceMarker: return "MissingConfidenceMarker";
    case ErrorCode::NonIntegerScore: return "NonIntegerScore";
    case ErrorCode::TopTokenNotNumeric: return "TopTokenNotNumeric";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::ContextLengthExceeded: return "ContextLengthExceeded";
    case ErrorCode::LogprobsUnsupported: return "LogprobsUnsupported";
    case ErrorCode::TokenNotInVocabulary: return "TokenNotInVocabulary";
    case ErrorCode::CacheCorrupt: return "CacheCorrupt";
    case ErrorCode::ReplayMiss: return "ReplayMiss";
    case ErrorCode::EmptySentence: return "EmptySentence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::DegenerateCorrelationMatrix: return "DegenerateCorrelationMatrix";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

Language Language::from_string(std::string_view iso) {
    if (iso == "en") return lang::en;
    if (iso == "fr") return lang::fr;
    if (iso == "hi") return lang::hi;
    if (iso == "ar") return lang::ar;
    if (iso == "ru") return lang::ru;
    if (iso == "el") return lang::el;
    raise(ErrorCode::UnsupportedLanguage, "unsupported language code '" + std::string(iso) + "'");
}

std::string_view Language::iso() const noexcept {
    switch (code_) {
    case Code::en: return "en";
    case Code::fr: return "fr";
    case Code::hi: return "hi";
    case Code::ar: return "ar";
    case Code::ru: return "ru";
    case Code::el: return "el";
    }
    return "??";
}

} // namespace ara
