#include "ara/prompting.hpp"

#include <gtest/gtest.h>

#include "ara/error.hpp"
#include "test_support.hpp"

using namespace ara;
using namespace ara::prompting;

namespace {

std::size_t occurrences(const std::string& haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

const std::string kSample = "The cat sat on the mat. It was happy.";

} // namespace

TEST(Prompt, GoldenTemplates) {
    ASSERT_EQ(test::read_text(test::data_path("golden/prompts/sample_text.txt")), kSample);
    EXPECT_EQ(build_prompt(kSample, PromptSpec::make(TemplateId::cefr)).text,
              test::read_text(test::data_path("golden/prompts/cefr.txt")));
    EXPECT_EQ(build_prompt(kSample, PromptSpec::make(TemplateId::cambridge)).text,
              test::read_text(test::data_path("golden/prompts/cambridge.txt")));
    EXPECT_EQ(build_prompt(kSample, PromptSpec::make(TemplateId::arbitrary)).text,
              test::read_text(test::data_path("golden/prompts/arbitrary.txt")));
}

TEST(Prompt, GoldenPreambles) {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"greek_language", "arbitrary_greek_language.txt"},
        {"greek_history", "arbitrary_greek_history.txt"},
        {"vikidia_en", "arbitrary_vikidia.txt"},
        {"vikidia_fr", "arbitrary_vikidia.txt"},
        {"asset", "arbitrary_asset.txt"},
    };
    for (const auto& [dataset, golden] : cases) {
        const auto spec = PromptSpec::make(TemplateId::arbitrary, preamble_for_dataset(dataset));
        EXPECT_EQ(build_prompt(kSample, spec).text,
                  test::read_text(test::data_path("golden/prompts/" + golden)))
            << dataset;
    }
}

TEST(Prompt, Openings) {
    EXPECT_TRUE(build_prompt("T", PromptSpec::make(TemplateId::cefr))
                    .text.starts_with("Rate the readability of the text between 1 (very easy) and 6 "
                                      "(very challenging)"));
    EXPECT_TRUE(build_prompt("T", PromptSpec::make(TemplateId::arbitrary))
                    .text.starts_with("Rate the readability of the text with a whole number value "
                                      "between 1 (very easy to understand) and 9 (very difficult "
                                      "to understand)"));
    EXPECT_TRUE(build_prompt("T", PromptSpec::make(TemplateId::arbitrary, preamble_for_dataset("vikidia_en")))
                    .text.starts_with("These Wikipedia articles are either intended for adult "
                                      "audiences or manually rewritten for children audiences."));
}

TEST(Preamble, Registry) {
    EXPECT_EQ(preamble_for_dataset("asset"),
              "All of these sentences were rewritten to compare different text simplification "
              "methodologies.");
    EXPECT_FALSE(preamble_for_dataset("clear"));
    EXPECT_FALSE(preamble_for_dataset("readme_ar"));
    EXPECT_NE(preamble_for_dataset("greek_history")->find("between fourth and twelfth grades"),
              std::string::npos);
    try {
        preamble_for_dataset("wikipedia");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownDataset);
    }
}

TEST(Prompt, Invariants) {
    const std::vector<std::string> texts{"x", "A longer text.\nWith two lines.", "Ünïcödé ελληνικά",
                                         "{TEXT} and {PREAMBLE} literal"};
    for (auto id : {TemplateId::cefr, TemplateId::cambridge, TemplateId::arbitrary}) {
        for (const auto& preamble : {std::optional<std::string>{}, std::optional<std::string>{"Ctx."}}) {
            const auto spec = PromptSpec::make(id, preamble);
            for (const auto& t : texts) {
                const auto a = build_prompt(t, spec);
                EXPECT_EQ(a.text, build_prompt(t, spec).text);
                EXPECT_EQ(occurrences(a.text, kAnswerFormat), 1u);
                EXPECT_EQ(recover_text(a.text, spec), t);
                EXPECT_FALSE(a.marker_collision);
            }
        }
    }
}

TEST(Prompt, MarkerCollisionIsFlagged) {
    const auto p = build_prompt("Answer: 5 is the reply.", PromptSpec::make(TemplateId::arbitrary));
    EXPECT_TRUE(p.marker_collision);
    EXPECT_TRUE(build_prompt("Confidence: high", PromptSpec::make(TemplateId::cefr)).marker_collision);
}

TEST(Scale, DefinitionsCoverTheRange) {
    const auto cefr = ScaleSpec::cefr();
    EXPECT_EQ(cefr.min(), 1);
    EXPECT_EQ(cefr.max(), 6);
    ASSERT_TRUE(cefr.definitions());
    const auto& tmpl = PromptLibrary::builtin().template_text(TemplateId::cefr);
    for (const auto& d : *cefr.definitions()) {
        EXPECT_NE(tmpl.find(std::to_string(d.level) + " = " + d.text), std::string::npos) << d.level;
    }
    const auto cam = ScaleSpec::cambridge();
    EXPECT_EQ(cam.max(), 5);
    const auto& cam_tmpl = PromptLibrary::builtin().template_text(TemplateId::cambridge);
    for (const auto& d : *cam.definitions()) {
        EXPECT_NE(cam_tmpl.find(std::to_string(d.level) + " = " + d.text), std::string::npos);
    }
    EXPECT_FALSE(ScaleSpec::arbitrary().definitions());
    EXPECT_EQ(ScaleSpec::arbitrary().max(), 9);

    EXPECT_THROW(ScaleSpec(3, 3), Error);
    EXPECT_THROW(ScaleSpec(1, 3, std::vector<LevelDefinition>{{1, "a"}, {3, "c"}}), Error);
    EXPECT_THROW(ScaleSpec(1, 2, std::vector<LevelDefinition>{{1, "a"}}), Error);
}

TEST(Library, LoadsFromDirectoryIdenticallyToBuiltin) {
    const auto lib = PromptLibrary::load(ARA_RESOURCE_DIR);
    for (auto id : {TemplateId::cefr, TemplateId::cambridge, TemplateId::arbitrary}) {
        EXPECT_EQ(lib.template_text(id), PromptLibrary::builtin().template_text(id));
    }
    EXPECT_EQ(lib.preamble("asset"), PromptLibrary::builtin().preamble("asset"));
}

TEST(Library, RejectsMalformedTemplates) {
    const std::string good = "{PREAMBLE}Rate {TEXT}. " + std::string(kAnswerFormat);
    auto with = [&](std::string cefr) {
        return PromptLibrary::from_strings(
            {{TemplateId::cefr, std::move(cefr)}, {TemplateId::cambridge, good}, {TemplateId::arbitrary, good}},
            {});
    };
    EXPECT_NO_THROW(with(good));
    EXPECT_THROW(with("Rate. " + std::string(kAnswerFormat)), Error);
    EXPECT_THROW(with("Rate {TEXT} {TEXT}. " + std::string(kAnswerFormat)), Error);
    EXPECT_THROW(with("Rate {TEXT}."), Error);
    EXPECT_THROW(with("Rate {TEXT}{PREAMBLE}. " + std::string(kAnswerFormat)), Error);

    const auto lib = with("{PREAMBLE}Custom {TEXT}! " + std::string(kAnswerFormat));
    EXPECT_EQ(build_prompt("hi", PromptSpec::make(TemplateId::cefr, "Pre."), lib).text,
              "Pre. Custom hi! " + std::string(kAnswerFormat));
}
