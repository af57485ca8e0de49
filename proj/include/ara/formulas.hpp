#pragma once

#include <optional>
#include <string_view>

#include "ara/language.hpp"
#include "ara/textmetrics.hpp"

namespace ara::formulas {

enum class FormulaKind { FKGL, ARI, LIX, FRE_EN, FRE_FR, FRE_RU, OSMAN };

enum class Polarity { DifficultyIncreasing, EaseIncreasing };

constexpr Polarity polarity(FormulaKind kind) noexcept {
    switch (kind) {
    case FormulaKind::FKGL:
    case FormulaKind::ARI:
    case FormulaKind::LIX:
        return Polarity::DifficultyIncreasing;
    default:
        return Polarity::EaseIncreasing;
    }
}

std::string_view to_string(FormulaKind kind) noexcept;
/// Accepts the tag names ("FKGL", "FRE_FR", ...), case-insensitively.
std::optional<FormulaKind> parse_formula_kind(std::string_view tag);

struct FormulaScore {
    double value;
    FormulaKind kind;
    /// `value` for difficulty-increasing formulas, `-value` for ease-increasing
    /// ones, so that higher always means harder.
    double difficulty_value;

    static FormulaScore make(FormulaKind kind, double value) noexcept {
        return {value, kind, polarity(kind) == Polarity::EaseIncreasing ? -value : value};
    }
};

/// Arabic-specific counts used by OSMAN on top of the shared TextStats.
struct OsmanCounts {
    std::size_t hard_word_count = 0;  ///< words with more than 5 syllables
    std::size_t long_word_count = 0;  ///< words with more than 5 letters
    std::size_t faseeh_count = 0;     ///< hard words with a faseeh letter or ending
};

// All of these throw DegenerateStats when word_count or sentence_count is zero.
FormulaScore fkgl(const text::TextStats& stats);
FormulaScore ari(const text::TextStats& stats);
FormulaScore lix(const text::TextStats& stats);
/// `variant` must be one of FRE_EN, FRE_FR, FRE_RU.
FormulaScore fre(const text::TextStats& stats, FormulaKind variant);
FormulaScore osman(const text::TextStats& stats, const OsmanCounts& extras);

/// Throws NonArabicInput unless lang is ar.
OsmanCounts osman_counts(std::string_view text, Language lang);

FormulaKind default_formula_for(Language lang) noexcept;

/// Computes stats (and OSMAN extras when needed) and applies `kind`.
FormulaScore score_text(std::string_view text, Language lang, FormulaKind kind);

} // namespace ara::formulas
