#include "ara/formulas.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "ara/error.hpp"
#include "utf8.hpp"

namespace ara::formulas {

namespace {

struct Ratios {
    double words_per_sentence;
    double syllables_per_word;
    double chars_per_word;
    double long_word_ratio;
};

Ratios ratios(const text::TextStats& s) {
    if (s.word_count == 0 || s.sentence_count == 0) {
        raise(ErrorCode::DegenerateStats, "word_count and sentence_count must be positive");
    }
    const auto words = static_cast<double>(s.word_count);
    return {words / static_cast<double>(s.sentence_count),
            static_cast<double>(s.syllable_count) / words,
            static_cast<double>(s.char_count) / words,
            static_cast<double>(s.long_word_count) / words};
}

// Flesch Reading Ease adaptations, as shipped by the textstat package:
// base - sentence_weight * (words/sentence) - syllable_weight * (syllables/word).
struct FreConstants {
    double base;
    double sentence_weight;
    double syllable_weight;
};

constexpr FreConstants kFreEnglish{206.835, 1.015, 84.6};
constexpr FreConstants kFreFrench{207.0, 1.015, 73.6};
constexpr FreConstants kFreRussian{206.835, 1.3, 60.1};

// OSMAN: 200.791 - 1.015 (A/B) - 24.181 (C/A + D/A + G/A + H/A), with
// A words, B sentences, C hard words, D syllables, G long words, H faseeh words.
constexpr double kOsmanIntercept = 200.791;
constexpr double kOsmanSentenceWeight = 1.015;
constexpr double kOsmanWordWeight = 24.181;

bool is_faseeh_letter(UChar32 c) {
    // hamza on yaa, hamza, hamza on waw, thal, zah
    return c == 0x0626 || c == 0x0621 || c == 0x0624 || c == 0x0630 || c == 0x0638;
}

} // namespace

std::string_view to_string(FormulaKind kind) noexcept {
    switch (kind) {
    case FormulaKind::FKGL: return "FKGL";
    case FormulaKind::ARI: return "ARI";
    case FormulaKind::LIX: return "LIX";
    case FormulaKind::FRE_EN: return "FRE_EN";
    case FormulaKind::FRE_FR: return "FRE_FR";
    case FormulaKind::FRE_RU: return "FRE_RU";
    case FormulaKind::OSMAN: return "OSMAN";
    }
    return "?";
}

std::optional<FormulaKind> parse_formula_kind(std::string_view tag) {
    std::string upper(tag);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (auto kind : {FormulaKind::FKGL, FormulaKind::ARI, FormulaKind::LIX, FormulaKind::FRE_EN,
                      FormulaKind::FRE_FR, FormulaKind::FRE_RU, FormulaKind::OSMAN}) {
        if (to_string(kind) == upper) {
            return kind;
        }
    }
    return std::nullopt;
}

FormulaScore fkgl(const text::TextStats& stats) {
    const auto r = ratios(stats);
    return FormulaScore::make(FormulaKind::FKGL,
                              0.39 * r.words_per_sentence + 11.8 * r.syllables_per_word - 15.59);
}

FormulaScore ari(const text::TextStats& stats) {
    const auto r = ratios(stats);
    return FormulaScore::make(FormulaKind::ARI,
                              4.71 * r.chars_per_word + 0.5 * r.words_per_sentence - 21.43);
}

FormulaScore lix(const text::TextStats& stats) {
    const auto r = ratios(stats);
    return FormulaScore::make(FormulaKind::LIX, r.words_per_sentence + 100.0 * r.long_word_ratio);
}

FormulaScore fre(const text::TextStats& stats, FormulaKind variant) {
    FreConstants k{};
    switch (variant) {
    case FormulaKind::FRE_EN: k = kFreEnglish; break;
    case FormulaKind::FRE_FR: k = kFreFrench; break;
    case FormulaKind::FRE_RU: k = kFreRussian; break;
    default: raise(ErrorCode::PreconditionViolation, "fre: not a Flesch Reading Ease variant");
    }
    const auto r = ratios(stats);
    return FormulaScore::make(variant, k.base - k.sentence_weight * r.words_per_sentence -
                                           k.syllable_weight * r.syllables_per_word);
}

FormulaScore osman(const text::TextStats& stats, const OsmanCounts& extras) {
    const auto r = ratios(stats);
    const auto words = static_cast<double>(stats.word_count);
    const double word_terms = static_cast<double>(extras.hard_word_count) / words +
                              r.syllables_per_word +
                              static_cast<double>(extras.long_word_count) / words +
                              static_cast<double>(extras.faseeh_count) / words;
    return FormulaScore::make(FormulaKind::OSMAN, kOsmanIntercept -
                                                      kOsmanSentenceWeight * r.words_per_sentence -
                                                      kOsmanWordWeight * word_terms);
}

OsmanCounts osman_counts(std::string_view text, Language lang) {
    if (!(lang == lang::ar)) {
        raise(ErrorCode::NonArabicInput, "OSMAN applies to Arabic text only");
    }
    OsmanCounts counts;
    for (const auto& sentence : text::segment_sentences(text, lang)) {
        for (const auto& word : text::tokenize_words(sentence, lang)) {
            const auto syllables = text::count_syllables(word, lang);
            const auto letters = text::count_letters(word); // harakat are marks, not letters
            if (letters > 5) {
                ++counts.long_word_count;
            }
            if (syllables > 5) {
                ++counts.hard_word_count;
                const auto cps = detail::decode_utf8(word);
                std::vector<UChar32> base;
                for (const auto& cp : cps) {
                    if (detail::is_letter(cp.value)) {
                        base.push_back(cp.value);
                    }
                }
                const bool letter = std::any_of(base.begin(), base.end(), is_faseeh_letter);
                const bool ending = base.size() >= 2 && base[base.size() - 2] == 0x0648 &&
                                    (base.back() == 0x0627 || base.back() == 0x0646);
                if (letter || ending) {
                    ++counts.faseeh_count;
                }
            }
        }
    }
    return counts;
}

FormulaKind default_formula_for(Language lang) noexcept {
    switch (lang.code()) {
    case Language::Code::en: return FormulaKind::FKGL;
    case Language::Code::ar: return FormulaKind::OSMAN;
    case Language::Code::hi:
    case Language::Code::el: return FormulaKind::LIX;
    case Language::Code::fr: return FormulaKind::FRE_FR;
    case Language::Code::ru: return FormulaKind::FRE_RU;
    }
    return FormulaKind::FKGL;
}

FormulaScore score_text(std::string_view text, Language lang, FormulaKind kind) {
    if (kind == FormulaKind::OSMAN && !(lang == lang::ar)) {
        raise(ErrorCode::NonArabicInput, "OSMAN applies to Arabic text only");
    }
    const auto stats = text::compute_stats(text, lang);
    switch (kind) {
    case FormulaKind::FKGL: return fkgl(stats);
    case FormulaKind::ARI: return ari(stats);
    case FormulaKind::LIX: return lix(stats);
    case FormulaKind::OSMAN: return osman(stats, osman_counts(text, lang));
    default: return fre(stats, kind);
    }
}

} // namespace ara::formulas
