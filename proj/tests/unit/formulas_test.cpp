#include "ara/formulas.hpp"

#include <random>

#include <gtest/gtest.h>

#include "ara/error.hpp"

using namespace ara;
using namespace ara::formulas;
using ara::text::TextStats;

namespace {

TextStats stats(std::size_t words, std::size_t sentences, std::size_t syllables = 0,
                std::size_t chars = 0, std::size_t long_words = 0) {
    TextStats s;
    s.word_count = words;
    s.sentence_count = sentences;
    s.syllable_count = syllables;
    s.char_count = chars;
    s.long_word_count = long_words;
    return s;
}

constexpr double kTol = 1e-9;

} // namespace

TEST(Fkgl, HandArithmetic) {
    EXPECT_NEAR(fkgl(stats(100, 10, 150)).value, 6.01, kTol);
    EXPECT_NEAR(fkgl(stats(1, 1, 1)).value, -3.40, kTol);
    EXPECT_NEAR(fkgl(stats(100, 4, 180)).value, 15.40, kTol);
}

TEST(Ari, HandArithmetic) {
    EXPECT_NEAR(ari(stats(100, 10, 0, 500)).value, 7.12, kTol);
    EXPECT_NEAR(ari(stats(1, 1, 0, 1)).value, -16.22, kTol);
    EXPECT_NEAR(ari(stats(100, 5, 0, 600)).value, 16.83, kTol);
}

TEST(Lix, HandArithmetic) {
    EXPECT_NEAR(lix(stats(100, 10, 0, 0, 20)).value, 30.0, kTol);
    EXPECT_NEAR(lix(stats(1, 1)).value, 1.0, kTol);
    EXPECT_NEAR(lix(stats(50, 2, 0, 0, 25)).value, 75.0, kTol);
}

TEST(Fre, HandArithmetic) {
    EXPECT_NEAR(fre(stats(100, 10, 150), FormulaKind::FRE_EN).value, 69.785, kTol);
    EXPECT_NEAR(fre(stats(1, 1, 1), FormulaKind::FRE_EN).value, 121.22, kTol);
    EXPECT_NEAR(fre(stats(100, 10, 150), FormulaKind::FRE_FR).value, 86.45, kTol);
    EXPECT_NEAR(fre(stats(100, 10, 150), FormulaKind::FRE_RU).value,
                206.835 - 1.3 * 10 - 60.1 * 1.5, kTol);
    EXPECT_THROW(fre(stats(1, 1, 1), FormulaKind::FKGL), Error);
}

TEST(Osman, InterceptAndSentenceTerm) {
    // Every per-word ratio zero, one word per sentence.
    const auto s = osman(stats(10, 10, 0), OsmanCounts{});
    EXPECT_NEAR(s.value, 200.791 - 1.015, kTol);
}

TEST(Osman, HardWordsLowerTheScore) {
    const auto base = stats(20, 2, 40, 100, 0);
    const auto easy = osman(base, OsmanCounts{0, 2, 0});
    const auto hard = osman(base, OsmanCounts{4, 6, 1});
    EXPECT_LT(hard.value, easy.value);
    EXPECT_GT(hard.difficulty_value, easy.difficulty_value);
    EXPECT_EQ(osman(base, OsmanCounts{1, 1, 1}).value, osman(base, OsmanCounts{1, 1, 1}).value);
}

TEST(Osman, TextLevelCounts) {
    const std::string text = "ذهب الولد إلى المدرسة. كتب الدرس.";
    const auto a = score_text(text, lang::ar, FormulaKind::OSMAN);
    EXPECT_EQ(a.value, score_text(text, lang::ar, FormulaKind::OSMAN).value);
    EXPECT_EQ(a.kind, FormulaKind::OSMAN);
    try {
        osman_counts("The cat sat.", lang::en);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonArabicInput);
    }
    try {
        score_text("The cat sat.", lang::en, FormulaKind::OSMAN);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonArabicInput);
    }
}

TEST(Formulas, DegenerateStats) {
    for (const auto& s : {stats(0, 1), stats(1, 0)}) {
        try {
            fkgl(s);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::DegenerateStats);
        }
        EXPECT_THROW(ari(s), Error);
        EXPECT_THROW(lix(s), Error);
        EXPECT_THROW(fre(s, FormulaKind::FRE_EN), Error);
        EXPECT_THROW(osman(s, {}), Error);
    }
}

TEST(Formulas, DefaultPerLanguage) {
    EXPECT_EQ(default_formula_for(lang::en), FormulaKind::FKGL);
    EXPECT_EQ(default_formula_for(lang::ar), FormulaKind::OSMAN);
    EXPECT_EQ(default_formula_for(lang::el), FormulaKind::LIX);
    EXPECT_EQ(default_formula_for(lang::hi), FormulaKind::LIX);
    EXPECT_EQ(default_formula_for(lang::fr), FormulaKind::FRE_FR);
    EXPECT_EQ(default_formula_for(lang::ru), FormulaKind::FRE_RU);
}

TEST(Formulas, ParseKind) {
    EXPECT_EQ(parse_formula_kind("fkgl"), FormulaKind::FKGL);
    EXPECT_EQ(parse_formula_kind("FRE_RU"), FormulaKind::FRE_RU);
    EXPECT_FALSE(parse_formula_kind("SMOG"));
}

namespace {

std::vector<FormulaScore> all_scores(const TextStats& s) {
    return {fkgl(s), ari(s), lix(s), fre(s, FormulaKind::FRE_EN), fre(s, FormulaKind::FRE_FR),
            fre(s, FormulaKind::FRE_RU), osman(s, OsmanCounts{1, 2, 1})};
}

} // namespace

TEST(FormulaProperties, PolarityScalingMonotonicity) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<std::size_t> small(1, 40);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t sentences = small(rng);
        const std::size_t words = sentences * small(rng);
        auto s = stats(words, sentences, words + small(rng) * 3, words * 4 + small(rng),
                       words / 3);

        for (const auto& score : all_scores(s)) {
            const double expected =
                polarity(score.kind) == Polarity::EaseIncreasing ? -score.value : score.value;
            EXPECT_EQ(score.difficulty_value, expected);
        }

        // Doubling every count leaves the ratios, hence the scores, unchanged.
        auto doubled = s;
        doubled.word_count *= 2;
        doubled.sentence_count *= 2;
        doubled.syllable_count *= 2;
        doubled.char_count *= 2;
        doubled.long_word_count *= 2;
        EXPECT_NEAR(fkgl(doubled).value, fkgl(s).value, 1e-12);
        EXPECT_NEAR(ari(doubled).value, ari(s).value, 1e-12);
        EXPECT_NEAR(lix(doubled).value, lix(s).value, 1e-12);
        EXPECT_NEAR(fre(doubled, FormulaKind::FRE_EN).value, fre(s, FormulaKind::FRE_EN).value, 1e-12);

        auto more_syllables = s;
        more_syllables.syllable_count += 1;
        EXPECT_GT(fkgl(more_syllables).value, fkgl(s).value);
        EXPECT_LT(fre(more_syllables, FormulaKind::FRE_EN).value, fre(s, FormulaKind::FRE_EN).value);
    }
}
