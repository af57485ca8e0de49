#include "ara/textmetrics.hpp"

#include <algorithm>
#include <array>

#include "ara/error.hpp"
#include "utf8.hpp"

namespace ara::text {

using detail::CodePoint;
using detail::decode_utf8;
using detail::is_letter;
using detail::is_mark;
using detail::is_space;

namespace {

constexpr std::array<std::string_view, 16> kEnglishAbbrev{
    "Dr.", "Mr.", "Mrs.", "Ms.", "Prof.", "St.", "Jr.", "Sr.",
    "etc.", "e.g.", "i.e.", "vs.", "approx.", "No.", "Fig.", "cf."};
constexpr std::array<std::string_view, 11> kFrenchAbbrev{
    "M.", "MM.", "Mme.", "Mmes.", "Mlle.", "Dr.", "Pr.", "etc.", "cf.", "p.ex.", "St."};
constexpr std::array<std::string_view, 9> kRussianAbbrev{
    "т.е.", "т.д.", "т.п.", "г.", "гг.", "др.", "см.", "им.", "ул."};
constexpr std::array<std::string_view, 5> kGreekAbbrev{
    "π.χ.", "κ.λπ.", "κ.ά.", "δηλ.", "κ.κ."};
constexpr std::array<std::string_view, 2> kHindiAbbrev{"डॉ.", "श्री."};
constexpr std::array<std::string_view, 1> kArabicAbbrev{"د."};

bool is_terminal(UChar32 c, Language lang) {
    switch (c) {
    case '.':
    case '!':
    case '?':
    case 0x2026: // ellipsis
        return true;
    case 0x0964: // danda
    case 0x0965: // double danda
        return lang == lang::hi;
    case 0x061F: // arabic question mark
        return lang == lang::ar;
    case ';':
    case 0x037E: // greek question mark
        return lang == lang::el;
    default:
        return false;
    }
}

bool is_closing(UChar32 c) {
    switch (c) {
    case '"':
    case '\'':
    case ')':
    case ']':
    case 0x2019:
    case 0x201D:
    case 0x00BB:
        return true;
    default:
        return false;
    }
}

bool is_apostrophe_or_hyphen(UChar32 c) {
    return c == '\'' || c == 0x2019 || c == 0x02BC || c == '-' || c == 0x2010 || c == 0x2011;
}

bool is_joiner(UChar32 c) { return c == 0x200C || c == 0x200D; }

std::string_view trim_unicode(std::string_view s) {
    const auto cps = decode_utf8(s);
    std::size_t first = 0;
    while (first < cps.size() && is_space(cps[first].value)) {
        ++first;
    }
    if (first == cps.size()) {
        return {};
    }
    std::size_t last = cps.size();
    while (last > first && is_space(cps[last - 1].value)) {
        --last;
    }
    return s.substr(cps[first].begin, cps[last - 1].end - cps[first].begin);
}

bool is_abbreviation(std::string_view token, Language lang) {
    const auto list = abbreviations(lang);
    return std::find(list.begin(), list.end(), token) != list.end();
}

// The whitespace-delimited token ending at `period_end`, minus opening brackets/quotes.
std::string_view token_before(std::string_view text, const std::vector<CodePoint>& cps,
                              std::size_t period_index) {
    std::size_t start = period_index;
    while (start > 0 && !is_space(cps[start - 1].value)) {
        --start;
    }
    while (start < period_index &&
           (cps[start].value == '(' || cps[start].value == '"' || cps[start].value == 0x201C ||
            cps[start].value == 0x00AB || cps[start].value == '[')) {
        ++start;
    }
    return text.substr(cps[start].begin, cps[period_index].end - cps[start].begin);
}

std::u32string lowercase(std::string_view word) {
    std::u32string out;
    for (const auto& cp : decode_utf8(word)) {
        out.push_back(static_cast<char32_t>(u_tolower(cp.value)));
    }
    return out;
}

std::size_t vowel_groups(const std::u32string& word, std::u32string_view vowels) {
    std::size_t groups = 0;
    bool in_group = false;
    for (char32_t c : word) {
        const bool vowel = vowels.find(c) != std::u32string_view::npos;
        if (vowel && !in_group) {
            ++groups;
        }
        in_group = vowel;
    }
    return groups;
}

bool ends_with(const std::u32string& s, std::u32string_view suffix) {
    return s.size() >= suffix.size() &&
           std::u32string_view(s).substr(s.size() - suffix.size()) == suffix;
}

std::size_t english_syllables(std::string_view word) {
    static constexpr std::u32string_view kVowels = U"aeiouyàáâäèéêëìíîïòóôöùúûü";
    std::u32string w;
    for (char32_t c : lowercase(word)) {
        if (is_letter(static_cast<UChar32>(c))) {
            w.push_back(c);
        }
    }
    if (w.size() <= 3) {
        return 1;
    }
    auto is_vowel = [](char32_t c) { return kVowels.find(c) != std::u32string_view::npos; };

    // Silent endings: -ed (except -ted/-ded), -es (except after sibilants), final -e (except -le).
    if (ends_with(w, U"ed")) {
        if (!ends_with(w, U"ted") && !ends_with(w, U"ded")) {
            w.resize(w.size() - 2);
        }
    } else if (ends_with(w, U"es")) {
        const bool sibilant = ends_with(w, U"ses") || ends_with(w, U"xes") ||
                              ends_with(w, U"zes") || ends_with(w, U"ches") ||
                              ends_with(w, U"shes") || ends_with(w, U"ces") ||
                              ends_with(w, U"ges");
        if (!sibilant) {
            w.resize(w.size() - 2);
        }
    } else if (ends_with(w, U"e")) {
        const bool syllabic_le = ends_with(w, U"le") && w.size() >= 3 && !is_vowel(w[w.size() - 3]);
        if (!syllabic_le && !ends_with(w, U"ee")) {
            w.pop_back();
        }
    }
    if (!w.empty() && w.front() == U'y') {
        w.erase(w.begin());
    }
    return std::max<std::size_t>(1, vowel_groups(w, kVowels));
}

std::size_t french_syllables(std::string_view word) {
    return std::max<std::size_t>(1, vowel_groups(lowercase(word), U"aeiouyàâäéèêëîïôöûùüÿœæ"));
}

std::size_t russian_syllables(std::string_view word) {
    // Every vowel letter is its own syllable nucleus in Russian.
    static constexpr std::u32string_view kVowels = U"аеёиоуыэюя";
    const auto w = lowercase(word);
    const auto n = static_cast<std::size_t>(std::count_if(
        w.begin(), w.end(), [](char32_t c) { return kVowels.find(c) != std::u32string_view::npos; }));
    return std::max<std::size_t>(1, n);
}

std::size_t greek_syllables(std::string_view word) {
    static constexpr std::u32string_view kVowels = U"αεηιουωάέήίόύώϊϋΐΰ";
    static constexpr std::u32string_view kDiaeresis = U"ϊϋΐΰ";
    std::size_t groups = 0;
    bool in_group = false;
    for (char32_t c : lowercase(word)) {
        const bool vowel = kVowels.find(c) != std::u32string_view::npos;
        // A diaeresis marks hiatus, so it always opens a new syllable.
        if (vowel && (!in_group || kDiaeresis.find(c) != std::u32string_view::npos)) {
            ++groups;
        }
        in_group = vowel;
    }
    return std::max<std::size_t>(1, groups);
}

std::size_t hindi_syllables(std::string_view word) {
    // Orthographic syllables: independent vowels plus consonants that are not
    // silenced by a following virama.
    const auto cps = decode_utf8(word);
    std::size_t n = 0;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const UChar32 c = cps[i].value;
        const bool independent_vowel = (c >= 0x0904 && c <= 0x0914) || c == 0x0960 || c == 0x0961;
        const bool consonant = (c >= 0x0915 && c <= 0x0939) || (c >= 0x0958 && c <= 0x095F);
        if (independent_vowel) {
            ++n;
        } else if (consonant) {
            std::size_t j = i + 1;
            if (j < cps.size() && cps[j].value == 0x093C) { // nukta
                ++j;
            }
            if (j >= cps.size() || cps[j].value != 0x094D) {
                ++n;
            }
        }
    }
    return std::max<std::size_t>(1, n);
}

bool is_arabic_long_vowel(UChar32 c) { return c == 0x0627 || c == 0x0648 || c == 0x064A || c == 0x0649; }

std::size_t arabic_syllables(std::string_view word) {
    // OSMAN weighting: short vowel = 1, long vowel = 2, stress (tanween/shadda) = 2.
    const auto cps = decode_utf8(word);
    const bool vocalized = std::any_of(cps.begin(), cps.end(), [](const CodePoint& cp) {
        return cp.value >= 0x064B && cp.value <= 0x0652;
    });
    std::size_t shorts = 0;
    std::size_t longs = 0;
    std::size_t stress = 0;
    if (vocalized) {
        for (std::size_t i = 0; i < cps.size(); ++i) {
            const UChar32 c = cps[i].value;
            if (c == 0x064E || c == 0x064F || c == 0x0650) {
                if (i + 1 < cps.size() && is_arabic_long_vowel(cps[i + 1].value)) {
                    ++longs;
                } else {
                    ++shorts;
                }
            } else if ((c >= 0x064B && c <= 0x064D) || c == 0x0651) {
                ++stress;
            }
        }
    } else {
        // Unvocalized: each non-final consonant carries an implied vowel, long
        // when a long-vowel letter follows it.
        std::vector<UChar32> letters;
        for (const auto& cp : cps) {
            if (is_letter(cp.value)) {
                letters.push_back(cp.value);
            }
        }
        for (std::size_t i = 0; i + 1 < letters.size(); ++i) {
            if (is_arabic_long_vowel(letters[i])) {
                continue;
            }
            if (is_arabic_long_vowel(letters[i + 1])) {
                ++longs;
            } else {
                ++shorts;
            }
        }
    }
    return std::max<std::size_t>(1, shorts + 2 * (longs + stress));
}

} // namespace

std::span<const std::string_view> abbreviations(Language lang) {
    switch (lang.code()) {
    case Language::Code::en: return kEnglishAbbrev;
    case Language::Code::fr: return kFrenchAbbrev;
    case Language::Code::ru: return kRussianAbbrev;
    case Language::Code::el: return kGreekAbbrev;
    case Language::Code::hi: return kHindiAbbrev;
    case Language::Code::ar: return kArabicAbbrev;
    }
    raise(ErrorCode::UnsupportedLanguage, "no abbreviation list");
}

std::vector<std::string> segment_sentences(std::string_view text, Language lang) {
    if (trim_unicode(text).empty()) {
        raise(ErrorCode::EmptyText, "text is empty or whitespace only");
    }
    const auto cps = decode_utf8(text);
    std::vector<std::string> sentences;
    auto emit = [&](std::size_t begin, std::size_t end) {
        const auto piece = trim_unicode(text.substr(begin, end - begin));
        if (!piece.empty()) {
            sentences.emplace_back(piece);
        }
    };

    std::size_t sentence_begin = 0;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (!is_terminal(cps[i].value, lang)) {
            ++i;
            continue;
        }
        const std::size_t mark = i;
        std::size_t j = i;
        while (j < cps.size() && is_terminal(cps[j].value, lang)) {
            ++j;
        }
        while (j < cps.size() && is_closing(cps[j].value)) {
            ++j;
        }
        const bool at_boundary = j == cps.size() || is_space(cps[j].value);
        const bool lone_period = cps[mark].value == '.' && j > mark &&
                                 (mark + 1 == cps.size() || cps[mark + 1].value != '.');
        if (at_boundary && lone_period && is_abbreviation(token_before(text, cps, mark), lang)) {
            i = j;
            continue;
        }
        if (at_boundary) {
            const std::size_t end = j == cps.size() ? text.size() : cps[j].begin;
            emit(sentence_begin, end);
            sentence_begin = end;
        }
        i = j;
    }
    if (sentence_begin < text.size()) {
        emit(sentence_begin, text.size());
    }
    return sentences;
}

std::vector<std::string> tokenize_words(std::string_view sentence, Language /*lang*/) {
    const auto cps = decode_utf8(sentence);
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (!is_letter(cps[i].value)) {
            ++i;
            continue;
        }
        const std::size_t begin = i;
        std::size_t end = i + 1; // one past the last accepted code point
        std::size_t j = i + 1;
        while (j < cps.size()) {
            const UChar32 c = cps[j].value;
            if (is_letter(c) || is_mark(c)) {
                end = ++j;
            } else if ((is_apostrophe_or_hyphen(c) || is_joiner(c)) && j + 1 < cps.size() &&
                       (is_letter(cps[j + 1].value) || (is_joiner(c) && is_mark(cps[j + 1].value)))) {
                j += 1;
            } else {
                break;
            }
        }
        words.emplace_back(sentence.substr(cps[begin].begin, cps[end - 1].end - cps[begin].begin));
        i = end;
    }
    return words;
}

std::size_t count_letters(std::string_view word) {
    const auto cps = decode_utf8(word);
    return static_cast<std::size_t>(
        std::count_if(cps.begin(), cps.end(), [](const CodePoint& cp) { return is_letter(cp.value); }));
}

std::size_t count_syllables(std::string_view word, Language lang) {
    require(count_letters(word) > 0, "count_syllables: word has no letter");
    switch (lang.code()) {
    case Language::Code::en: return english_syllables(word);
    case Language::Code::fr: return french_syllables(word);
    case Language::Code::ru: return russian_syllables(word);
    case Language::Code::el: return greek_syllables(word);
    case Language::Code::hi: return hindi_syllables(word);
    case Language::Code::ar: return arabic_syllables(word);
    }
    raise(ErrorCode::UnsupportedLanguage, "count_syllables");
}

TextStats compute_stats(std::string_view text, Language lang) {
    TextStats stats;
    const auto sentences = segment_sentences(text, lang);
    stats.sentence_count = sentences.size();
    for (const auto& sentence : sentences) {
        for (const auto& word : tokenize_words(sentence, lang)) {
            const auto letters = count_letters(word);
            const auto syllables = count_syllables(word, lang);
            ++stats.word_count;
            stats.char_count += letters;
            stats.syllable_count += syllables;
            if (letters > 6) {
                ++stats.long_word_count;
            }
            if (syllables >= 3) {
                ++stats.polysyllable_count;
            }
        }
    }
    return stats;
}

} // namespace ara::text
