#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ara/language.hpp"

namespace ara::text {

/// Shallow counts of a text. Every readability formula is a function of these.
struct TextStats {
    std::size_t sentence_count = 0;
    std::size_t word_count = 0;
    std::size_t char_count = 0;         ///< letters only; no digits, punctuation or whitespace
    std::size_t syllable_count = 0;
    std::size_t long_word_count = 0;    ///< words with more than 6 letters
    std::size_t polysyllable_count = 0; ///< words with 3 or more syllables

    friend bool operator==(const TextStats&, const TextStats&) = default;
};

/// Splits at terminal punctuation (. ! ? and the language's own marks)
/// followed by whitespace or end of text. Entries of abbreviations(lang)
/// never end a sentence. Returned sentences are trimmed.
/// Throws EmptyText when `text` is empty or whitespace only.
std::vector<std::string> segment_sentences(std::string_view text, Language lang);

/// Maximal runs of letters (with their combining marks), allowing internal
/// apostrophes, hyphens and zero-width joiners. Digits and punctuation are
/// not words.
std::vector<std::string> tokenize_words(std::string_view sentence, Language lang);

/// Heuristic syllable count; at least 1 for any word containing a letter.
/// Throws PreconditionViolation when `word` has no letter.
std::size_t count_syllables(std::string_view word, Language lang);

/// Number of Unicode letters (general category L*) in `word`.
std::size_t count_letters(std::string_view word);

TextStats compute_stats(std::string_view text, Language lang);

/// Abbreviations (with their trailing period) that do not end a sentence.
std::span<const std::string_view> abbreviations(Language lang);

} // namespace ara::text
