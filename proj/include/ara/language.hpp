#pragma once

#include <array>
#include <string>
#include <string_view>

namespace ara {

/// One of the six supported text languages, identified by ISO-639-1 code.
class Language {
public:
    enum class Code { en, fr, hi, ar, ru, el };

    constexpr Language(Code code) noexcept : code_(code) {}

    /// Throws UnsupportedLanguage for anything but the six known codes.
    static Language from_string(std::string_view iso);

    constexpr Code code() const noexcept { return code_; }
    std::string_view iso() const noexcept;

    friend constexpr bool operator==(Language a, Language b) noexcept { return a.code_ == b.code_; }

    static constexpr std::array<Code, 6> all{Code::en, Code::fr, Code::hi,
                                            Code::ar, Code::ru, Code::el};

private:
    Code code_;
};

namespace lang {
inline constexpr Language en{Language::Code::en};
inline constexpr Language fr{Language::Code::fr};
inline constexpr Language hi{Language::Code::hi};
inline constexpr Language ar{Language::Code::ar};
inline constexpr Language ru{Language::Code::ru};
inline constexpr Language el{Language::Code::el};
} // namespace lang

} // namespace ara
