#include "ara/prompting.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "ara/error.hpp"

namespace ara::prompting {

namespace detail {
const std::map<std::string_view, std::string_view>& embedded_resources();
}

namespace {

constexpr std::string_view kTextSlot = "{TEXT}";
constexpr std::string_view kPreambleSlot = "{PREAMBLE}";

const std::array<std::string, 6> kCefrDescriptors{
    "Can understand very short, simple texts a single phrase at a time, picking up familiar "
    "names, words and basic phrases and rereading as required.",
    "Can understand short, simple texts on familiar matters of a concrete type",
    "Can read straightforward factual texts on subjects related to his/her field and interest "
    "with a satisfactory level of comprehension.",
    "Can read with a large degree of independence, adapting style and speed of reading to "
    "different texts and purpose",
    "Can understand in detail lengthy, complex texts, whether or not they relate to his/her own "
    "area of specialty, provided he/she can reread difficult sections.",
    "Can understand and interpret critically virtually all forms of the written language "
    "including abstract, structurally complex, or highly colloquial literary and non-literary "
    "writings.",
};

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

void validate_template(TemplateId id, const std::string& text) {
    const std::string name(to_string(id));
    if (count_occurrences(text, kTextSlot) != 1) {
        raise(ErrorCode::InvalidConfig, "template '" + name + "' must contain exactly one {TEXT}");
    }
    const auto preamble_slots = count_occurrences(text, kPreambleSlot);
    if (preamble_slots > 1 || (preamble_slots == 1 && !text.starts_with(kPreambleSlot))) {
        raise(ErrorCode::InvalidConfig, "template '" + name + "' may only start with {PREAMBLE}");
    }
    if (count_occurrences(text, kAnswerFormat) != 1) {
        raise(ErrorCode::InvalidConfig,
              "template '" + name + "' must contain the answer-format instruction once");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::InvalidConfig, "cannot read prompt resource " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Split {
    std::string_view head; // template text before {TEXT}, without the preamble slot
    std::string_view tail;
    bool has_preamble_slot;
};

Split split_template(std::string_view tmpl) {
    Split s{};
    s.has_preamble_slot = tmpl.starts_with(kPreambleSlot);
    if (s.has_preamble_slot) {
        tmpl.remove_prefix(kPreambleSlot.size());
    }
    const auto slot = tmpl.find(kTextSlot);
    s.head = tmpl.substr(0, slot);
    s.tail = tmpl.substr(slot + kTextSlot.size());
    return s;
}

std::string preamble_prefix(const PromptSpec& spec, const Split& split) {
    if (!spec.context_preamble || !split.has_preamble_slot) {
        return {};
    }
    return *spec.context_preamble + " ";
}

} // namespace

std::string_view to_string(TemplateId id) noexcept {
    switch (id) {
    case TemplateId::cefr: return "cefr";
    case TemplateId::cambridge: return "cambridge";
    case TemplateId::arbitrary: return "arbitrary";
    }
    return "?";
}

std::optional<TemplateId> parse_template_id(std::string_view name) noexcept {
    if (name == "cefr") return TemplateId::cefr;
    if (name == "cambridge") return TemplateId::cambridge;
    if (name == "arbitrary") return TemplateId::arbitrary;
    return std::nullopt;
}

ScaleSpec::ScaleSpec(int min, int max, std::optional<std::vector<LevelDefinition>> definitions)
    : min_(min), max_(max), definitions_(std::move(definitions)) {
    require(min_ < max_, "ScaleSpec: min must be below max");
    if (definitions_) {
        require(definitions_->size() == static_cast<std::size_t>(max_ - min_ + 1),
                "ScaleSpec: definitions must cover min..max");
        int expected = min_;
        for (const auto& d : *definitions_) {
            require(d.level == expected++, "ScaleSpec: definitions must be ordered without gaps");
        }
    }
}

ScaleSpec ScaleSpec::cefr() {
    std::vector<LevelDefinition> defs;
    for (int level = 1; level <= 6; ++level) {
        defs.push_back({level, kCefrDescriptors[static_cast<std::size_t>(level - 1)]});
    }
    return ScaleSpec(1, 6, std::move(defs));
}

ScaleSpec ScaleSpec::cambridge() {
    std::vector<LevelDefinition> defs;
    for (int level = 1; level <= 5; ++level) {
        defs.push_back({level, kCefrDescriptors[static_cast<std::size_t>(level)]});
    }
    return ScaleSpec(1, 5, std::move(defs));
}

ScaleSpec ScaleSpec::arbitrary() { return ScaleSpec(1, 9); }
ScaleSpec ScaleSpec::confidence() { return ScaleSpec(1, 9); }

PromptSpec PromptSpec::make(TemplateId id, std::optional<std::string> preamble) {
    switch (id) {
    case TemplateId::cefr: return {ScaleSpec::cefr(), std::move(preamble), id};
    case TemplateId::cambridge: return {ScaleSpec::cambridge(), std::move(preamble), id};
    case TemplateId::arbitrary: return {ScaleSpec::arbitrary(), std::move(preamble), id};
    }
    raise(ErrorCode::PreconditionViolation, "unknown template id");
}

const PromptLibrary& PromptLibrary::builtin() {
    static const PromptLibrary library = [] {
        const auto& res = detail::embedded_resources();
        std::map<TemplateId, std::string> templates;
        std::map<std::string, std::string> preambles;
        for (auto id : {TemplateId::cefr, TemplateId::cambridge, TemplateId::arbitrary}) {
            templates[id] = std::string(res.at(std::string(to_string(id)) + ".txt"));
        }
        constexpr std::string_view kDir = "preambles/";
        for (const auto& [name, text] : res) {
            if (name.starts_with(kDir)) {
                auto key = name.substr(kDir.size());
                key.remove_suffix(4); // ".txt"
                preambles[std::string(key)] = std::string(text);
            }
        }
        return from_strings(std::move(templates), std::move(preambles));
    }();
    return library;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& directory) {
    std::map<TemplateId, std::string> templates;
    for (auto id : {TemplateId::cefr, TemplateId::cambridge, TemplateId::arbitrary}) {
        templates[id] = read_file(directory / (std::string(to_string(id)) + ".txt"));
    }
    std::map<std::string, std::string> preambles;
    const auto preamble_dir = directory / "preambles";
    if (std::filesystem::is_directory(preamble_dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(preamble_dir)) {
            if (entry.path().extension() == ".txt") {
                preambles[entry.path().stem().string()] = read_file(entry.path());
            }
        }
    }
    return from_strings(std::move(templates), std::move(preambles));
}

PromptLibrary PromptLibrary::from_strings(std::map<TemplateId, std::string> templates,
                                          std::map<std::string, std::string> preambles) {
    PromptLibrary lib;
    for (auto id : {TemplateId::cefr, TemplateId::cambridge, TemplateId::arbitrary}) {
        const auto it = templates.find(id);
        if (it == templates.end()) {
            raise(ErrorCode::InvalidConfig, "missing template '" + std::string(to_string(id)) + "'");
        }
        validate_template(id, it->second);
    }
    lib.templates_ = std::move(templates);
    lib.preambles_.insert(preambles.begin(), preambles.end());
    return lib;
}

const std::string& PromptLibrary::template_text(TemplateId id) const { return templates_.at(id); }

std::optional<std::string> PromptLibrary::preamble(std::string_view name) const {
    const auto it = preambles_.find(name);
    if (it == preambles_.end()) {
        return std::nullopt;
    }
    return it->second;
}

BuiltPrompt build_prompt(std::string_view text, const PromptSpec& spec, const PromptLibrary& library) {
    require(!text.empty(), "build_prompt: empty text");
    const auto split = split_template(library.template_text(spec.template_id));
    BuiltPrompt out;
    out.text = preamble_prefix(spec, split);
    out.text.append(split.head);
    out.text.append(text);
    out.text.append(split.tail);
    out.marker_collision = text.find("Answer:") != std::string_view::npos ||
                           text.find("Confidence:") != std::string_view::npos;
    return out;
}

std::optional<std::string> recover_text(std::string_view prompt, const PromptSpec& spec,
                                        const PromptLibrary& library) {
    const auto split = split_template(library.template_text(spec.template_id));
    const auto prefix = preamble_prefix(spec, split) + std::string(split.head);
    if (prompt.size() < prefix.size() + split.tail.size() || !prompt.starts_with(prefix) ||
        !prompt.ends_with(split.tail)) {
        return std::nullopt;
    }
    return std::string(prompt.substr(prefix.size(), prompt.size() - prefix.size() - split.tail.size()));
}

std::optional<std::string> preamble_for_dataset(std::string_view dataset_id,
                                                const PromptLibrary& library) {
    static const std::map<std::string_view, std::optional<std::string_view>> kPreambleKeys{
        {"readme_en", std::nullopt},      {"readme_fr", std::nullopt},
        {"readme_hi", std::nullopt},      {"readme_ar", std::nullopt},
        {"readme_ru", std::nullopt},      {"medreadme", std::nullopt},
        {"cambridge", std::nullopt},      {"clear", std::nullopt},
        {"onestop", std::nullopt},        {"greek_language", "greek_language"},
        {"greek_history", "greek_history"}, {"vikidia_en", "vikidia"},
        {"vikidia_fr", "vikidia"},        {"asset", "asset"},
    };
    const auto it = kPreambleKeys.find(dataset_id);
    if (it == kPreambleKeys.end()) {
        raise(ErrorCode::UnknownDataset, "no built-in dataset '" + std::string(dataset_id) + "'");
    }
    if (!it->second) {
        return std::nullopt;
    }
    auto text = library.preamble(*it->second);
    if (!text) {
        raise(ErrorCode::InvalidConfig, "prompt library lacks preamble '" + std::string(*it->second) + "'");
    }
    return text;
}

} // namespace ara::prompting
