#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ara::prompting {

/// The answer-format instruction every template ends with.
inline constexpr std::string_view kAnswerFormat =
    "Answer with this format: Answer: [SCORE] Confidence: [Confidence Score] "
    "Explanation: [EXPLANATION]";

enum class TemplateId { cefr, cambridge, arbitrary };

std::string_view to_string(TemplateId id) noexcept;
std::optional<TemplateId> parse_template_id(std::string_view name) noexcept;

struct LevelDefinition {
    int level;
    std::string text;
    friend bool operator==(const LevelDefinition&, const LevelDefinition&) = default;
};

/// Integer rating scale, optionally with a definition per level.
class ScaleSpec {
public:
    /// Throws PreconditionViolation unless min < max and the definitions (if
    /// any) cover min..max in order without gaps.
    ScaleSpec(int min, int max, std::optional<std::vector<LevelDefinition>> definitions = {});

    static ScaleSpec cefr();       ///< 1..6 with the six CEFR level descriptors
    static ScaleSpec cambridge();  ///< 1..5, CEFR without A1
    static ScaleSpec arbitrary();  ///< 1..9, no definitions
    static ScaleSpec confidence(); ///< 1..9 verbal confidence

    int min() const noexcept { return min_; }
    int max() const noexcept { return max_; }
    const std::optional<std::vector<LevelDefinition>>& definitions() const noexcept {
        return definitions_;
    }

    friend bool operator==(const ScaleSpec&, const ScaleSpec&) = default;

private:
    int min_;
    int max_;
    std::optional<std::vector<LevelDefinition>> definitions_;
};

struct PromptSpec {
    ScaleSpec scale;
    std::optional<std::string> context_preamble;
    TemplateId template_id;

    /// The scale implied by `id`, validated against it.
    static PromptSpec make(TemplateId id, std::optional<std::string> preamble = {});
};

/// Prompt templates keyed by template id, plus named preambles. A template
/// holds exactly one {TEXT} slot, an optional leading {PREAMBLE} slot, and
/// exactly one answer-format instruction.
class PromptLibrary {
public:
    /// Templates compiled into the library from resources/prompts/v1.
    static const PromptLibrary& builtin();

    /// Reads cefr.txt, cambridge.txt, arbitrary.txt and preambles/*.txt.
    static PromptLibrary load(const std::filesystem::path& directory);

    static PromptLibrary from_strings(std::map<TemplateId, std::string> templates,
                                      std::map<std::string, std::string> preambles);

    const std::string& template_text(TemplateId id) const;
    std::optional<std::string> preamble(std::string_view name) const;

private:
    std::map<TemplateId, std::string> templates_;
    std::map<std::string, std::string, std::less<>> preambles_;
};

struct BuiltPrompt {
    std::string text;
    /// The input text itself contains "Answer:" or "Confidence:", which can
    /// confuse response parsing.
    bool marker_collision = false;
};

BuiltPrompt build_prompt(std::string_view text, const PromptSpec& spec,
                         const PromptLibrary& library = PromptLibrary::builtin());

/// Inverse of build_prompt: the text substituted into `prompt`, or nullopt
/// when `prompt` was not built from `spec`.
std::optional<std::string> recover_text(std::string_view prompt, const PromptSpec& spec,
                                        const PromptLibrary& library = PromptLibrary::builtin());

/// Dataset-specific framing sentence for the built-in datasets.
/// Throws UnknownDataset for ids outside the built-in registry.
std::optional<std::string> preamble_for_dataset(std::string_view dataset_id,
                                                const PromptLibrary& library = PromptLibrary::builtin());

} // namespace ara::prompting
