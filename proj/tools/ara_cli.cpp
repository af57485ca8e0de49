#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ara/cache.hpp"
#include "ara/error.hpp"
#include "ara/pipeline.hpp"
#include "json.hpp"

namespace {

using ara::pipeline::RunConfig;

struct Flags {
    std::string config_file;
    std::string dataset;
    std::string input;
    std::string registry;
    std::string methods;
    std::string endpoint;
    std::string fill_mask_endpoint;
    std::string model;
    int top_logprobs = 0;
    std::string cache_dir;
    bool replay_only = false;
    std::size_t parallelism = 0;
    std::string out;
    std::string format;
    std::string template_id;
    bool degrade = false;
};

void add_run_flags(CLI::App& app, Flags& f) {
    app.add_option("--config", f.config_file, "JSON config file; flags override its values")->check(CLI::ExistingFile);
    app.add_option("--dataset", f.dataset, "registered dataset id");
    app.add_option("--input", f.input, "dataset file (.jsonl or .csv)");
    app.add_option("--registry", f.registry, "extra dataset descriptors (JSON)")->check(CLI::ExistingFile);
    app.add_option("--methods", f.methods, "comma-separated: formula:<KIND>, rsrs, llm_expected, llm_vanilla, laurae*");
    app.add_option("--endpoint", f.endpoint, "chat-completions base URL (default $ARA_ENDPOINT)");
    app.add_option("--fill-mask-endpoint", f.fill_mask_endpoint, "fill-mask base URL (default $ARA_FILL_MASK_ENDPOINT)");
    app.add_option("--model", f.model, "model id sent to the endpoint");
    app.add_option("--top-logprobs", f.top_logprobs, "alternatives requested per position")->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", f.cache_dir, "response cache directory (default $ARA_CACHE_DIR)");
    app.add_flag("--replay-only", f.replay_only, "serve every provider call from the cache");
    app.add_option("--parallelism", f.parallelism, "concurrent texts")->check(CLI::PositiveNumber);
    app.add_option("--out", f.out, "directory for report and records");
    app.add_option("--format", f.format, "stdout format")->check(CLI::IsMember({"json", "table"}));
    app.add_option("--template", f.template_id, "prompt template override")
        ->check(CLI::IsMember({"cefr", "cambridge", "arbitrary"}));
    app.add_flag("--degrade-to-vanilla", f.degrade, "use sampled answers when the endpoint has no logprobs");
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

RunConfig build_config(const CLI::App& app, const Flags& f) {
    RunConfig c = f.config_file.empty() ? RunConfig{} : RunConfig::from_file(f.config_file);
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--dataset")) c.dataset_id = f.dataset;
    if (given("--input")) c.input_path = f.input;
    if (given("--registry")) c.registry_extension = f.registry;
    if (given("--methods")) c.methods = split_csv(f.methods);
    if (given("--endpoint")) c.endpoint = f.endpoint;
    if (given("--fill-mask-endpoint")) c.fill_mask_endpoint = f.fill_mask_endpoint;
    if (given("--model")) c.model_id = f.model;
    if (given("--top-logprobs")) c.top_logprobs_k = f.top_logprobs;
    if (given("--cache-dir")) c.cache_dir = f.cache_dir;
    if (given("--replay-only")) c.replay_only = true;
    if (given("--parallelism")) c.parallelism = f.parallelism;
    if (given("--out")) c.out_dir = f.out;
    if (given("--format")) c.format = f.format;
    if (given("--template")) c.template_override = ara::prompting::parse_template_id(f.template_id);
    if (given("--degrade-to-vanilla")) c.degrade_to_vanilla = true;
    return c;
}

ara::datasets::DatasetRegistry registry_for(const RunConfig& c) {
    auto reg = ara::datasets::registry();
    if (c.registry_extension) reg.load_extension(*c.registry_extension);
    return reg;
}

int run_score(const CLI::App& app, const Flags& f, const std::string& text_arg, const std::string& file,
              const std::string& lang) {
    auto config = build_config(app, f);
    std::string text = text_arg;
    if (!file.empty()) {
        std::ifstream in(file, std::ios::binary);
        if (!in) ara::raise(ara::ErrorCode::InvalidConfig, "cannot read " + file);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    if (text.empty()) ara::raise(ara::ErrorCode::InvalidConfig, "give --text or --file");

    auto language = ara::lang::en;
    auto template_id = ara::prompting::TemplateId::arbitrary;
    std::optional<std::string> preamble;
    if (config.dataset_id) {
        const auto& d = registry_for(config).get(*config.dataset_id);
        language = d.language;
        template_id = d.prompt_template;
        preamble = d.preamble;
    }
    if (!lang.empty()) language = ara::Language::from_string(lang);
    if (config.template_override) template_id = *config.template_override;

    const auto providers = ara::pipeline::make_providers(config);
    const auto result = ara::pipeline::score_single(text, language, template_id, preamble, config, providers);
    std::cout << result.to_json() << '\n';
    return 0;
}

int run_assess(const CLI::App& app, const Flags& f) {
    const auto config = build_config(app, f);
    const auto dataset = ara::pipeline::load_for_run(config, registry_for(config));
    const auto providers = ara::pipeline::make_providers(config);
    const auto result = ara::pipeline::assess(config, dataset, providers);
    if (config.out_dir) ara::pipeline::write_outputs(result, *config.out_dir);
    std::cout << (config.format == "table" ? result.report.to_table() : result.report_json() + "\n");
    return 0;
}

int run_ablate(const CLI::App& app, const Flags& f) {
    const auto config = build_config(app, f);
    const auto dataset = ara::pipeline::load_for_run(config, registry_for(config));
    const auto providers = ara::pipeline::make_providers(config);
    const auto report = ara::pipeline::ablate(config, dataset, providers);
    const auto json = report.to_json() + "\n";
    if (config.out_dir) {
        std::filesystem::create_directories(*config.out_dir);
        std::ofstream(*config.out_dir / "ablation.json", std::ios::binary) << json;
    }
    std::cout << (config.format == "table" ? report.to_table() : json);
    return 0;
}

int run_cache_inspect(const std::string& dir) {
    std::ifstream in(std::filesystem::path(dir) / "responses.jsonl", std::ios::binary);
    if (!in) ara::raise(ara::ErrorCode::InvalidConfig, "no responses.jsonl in " + dir);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            std::cout << n << "\t<unreadable>\n";
            continue;
        }
        std::cout << n << '\t' << rec.value("key", "?") << '\t' << rec.value("timestamp", "?") << '\t'
                  << rec.value("raw_response", "").size() << " bytes\n";
    }
    return 0;
}

int run_cache_verify(const std::string& dir) {
    const auto r = ara::providers::ResponseCache::verify(dir);
    std::cout << "records " << r.records << "\nvalid " << r.valid << "\ncorrupt " << r.corrupt << "\ndistinct keys "
              << r.distinct_keys << '\n';
    return r.corrupt == 0 ? 0 : 1;
}

int run_datasets(const std::string& registry_file) {
    auto reg = ara::datasets::registry();
    if (!registry_file.empty()) reg.load_extension(registry_file);
    std::cout << std::left << std::setw(16) << "id" << std::setw(6) << "lang" << std::setw(12) << "kind"
              << std::setw(11) << "template" << std::setw(9) << "formula" << "ratings\n";
    for (const auto& id : reg.ids()) {
        const auto& d = reg.get(id);
        std::string range = "-";
        if (d.kind == ara::datasets::DatasetKind::rating) {
            std::ostringstream r;
            if (d.rating_range) {
                r << d.rating_range->min << ".." << d.rating_range->max;
            } else {
                r << "unbounded";
            }
            r << ", " << ara::datasets::to_string(d.rating_polarity);
            range = r.str();
        }
        std::cout << std::setw(16) << id << std::setw(6) << d.language.iso() << std::setw(12)
                  << ara::datasets::to_string(d.kind) << std::setw(11) << ara::prompting::to_string(d.prompt_template)
                  << std::setw(9) << ara::formulas::to_string(d.default_formula) << range << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Readability assessment with LLM scoring, readability formulas and ensembles"};
    app.require_subcommand(1);

    Flags score_flags, assess_flags, ablate_flags;
    std::string text, text_file, lang;
    auto* score = app.add_subcommand("score", "score one text");
    add_run_flags(*score, score_flags);
    score->add_option("--text", text, "text to score");
    score->add_option("--file", text_file, "read the text from a file")->check(CLI::ExistingFile);
    score->add_option("--lang", lang, "ISO-639-1 language (en, fr, hi, ar, ru, el)");

    auto* assess = app.add_subcommand("assess", "score and evaluate a dataset");
    add_run_flags(*assess, assess_flags);

    auto* ablate = app.add_subcommand("ablate", "paired configuration comparisons on a dataset");
    add_run_flags(*ablate, ablate_flags);

    std::string cache_dir;
    auto* cache = app.add_subcommand("cache", "inspect or verify a response cache");
    cache->require_subcommand(1);
    auto* inspect = cache->add_subcommand("inspect", "list cached records");
    inspect->add_option("--cache-dir", cache_dir)->required();
    auto* verify = cache->add_subcommand("verify", "check record checksums");
    verify->add_option("--cache-dir", cache_dir)->required();

    std::string registry_file;
    auto* list = app.add_subcommand("datasets", "list registered datasets");
    list->add_option("--registry", registry_file, "extra dataset descriptors (JSON)")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*score) return run_score(*score, score_flags, text, text_file, lang);
        if (*assess) return run_assess(*assess, assess_flags);
        if (*ablate) return run_ablate(*ablate, ablate_flags);
        if (*inspect) return run_cache_inspect(cache_dir);
        if (*verify) return run_cache_verify(cache_dir);
        if (*list) return run_datasets(registry_file);
    } catch (const ara::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ara::ErrorCode::InvalidConfig ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
