#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ara/datasets.hpp"
#include "ara/ensemble.hpp"
#include "ara/evaluation.hpp"
#include "ara/formulas.hpp"
#include "ara/providers.hpp"
#include "ara/rsrs.hpp"
#include "ara/scoring.hpp"

namespace ara::pipeline {

enum class MethodKind { formula, rsrs, llm_expected, llm_vanilla, ensemble };

struct Method {
    std::string name; ///< as written: "formula:FKGL", "rsrs", "llm_expected", "laurae_minmax", ...
    MethodKind kind = MethodKind::formula;
    std::optional<formulas::FormulaKind> formula;
    std::optional<ensemble::EnsembleConfig> ensemble;
};

/// Parses method names. Throws InvalidConfig for unknown names.
Method parse_method(std::string_view name);

/// The parsed, validated method set of a run, plus the sources each
/// ensemble draws on.
struct MethodPlan {
    std::vector<Method> methods;
    std::optional<std::string> llm_source;     ///< llm_expected if requested, else llm_vanilla
    std::optional<std::string> formula_source; ///< first formula method listed

    bool needs_llm() const;
    bool needs_rsrs() const;
    bool has(std::string_view name) const;
};

/// Ensembles need an LLM method and their shallow source in the same set.
MethodPlan plan_methods(const std::vector<std::string>& names);

struct RunConfig {
    std::optional<std::string> dataset_id;
    std::optional<std::filesystem::path> input_path; ///< ad-hoc file; uses dataset_id's descriptor if given
    std::optional<std::filesystem::path> registry_extension;
    std::vector<std::string> methods{"llm_expected"};

    std::string endpoint;
    std::string fill_mask_endpoint;
    std::string model_id;
    int top_logprobs_k = 10;
    int max_output_tokens = 256;
    std::optional<std::size_t> context_limit_tokens;

    std::optional<std::filesystem::path> cache_dir;
    bool replay_only = false;
    std::size_t parallelism = 4;
    std::uint64_t seed = 0;

    std::optional<prompting::TemplateId> template_override;
    scoring::ExpectedValueOptions expected_value;
    rsrs::WnllMode wnll_mode = rsrs::WnllMode::full_vector;
    /// Without logprob support, fall back to the sampled answer for vanilla
    /// scores instead of aborting.
    bool degrade_to_vanilla = false;
    int max_reasks = 1;

    std::optional<std::filesystem::path> out_dir;
    std::string format = "json"; ///< json | table

    /// Reads a JSON object whose keys mirror the fields above.
    static RunConfig from_json(std::string_view json_text);
    static RunConfig from_file(const std::filesystem::path& path);
};

struct Providers {
    std::shared_ptr<providers::ChatProvider> chat;
    std::shared_ptr<providers::FillMaskProvider> fill_mask;
};

/// Builds HTTP providers (or replay stand-ins) wrapped in the response cache
/// when one is configured. Environment variables fill unset endpoints and
/// the API key.
Providers make_providers(const RunConfig& config);

/// One scored text. Every requested method has either a score or a failure.
struct ScoredText {
    std::string id; ///< item id, or "<id>#a" / "<id>#b" for comparison texts
    std::map<std::string, double> scores; ///< difficulty-aligned
    std::map<std::string, std::string> failures;
    std::optional<double> confidence; ///< c
    std::optional<double> entropy;    ///< H at the score position
    std::optional<long long> answer;  ///< integer the model wrote
    std::optional<std::string> response_key; ///< cache key of the response used
    int attempts = 0;

    std::optional<double> score(std::string_view method) const;
};

struct EnsembleSummary {
    std::string method;
    std::optional<ensemble::DatasetStats> stats;
    std::optional<ensemble::ConfidenceSummary> confidences;
    bool minmax_fallback = false;
    std::optional<std::string> error;
};

struct AssessResult {
    datasets::DatasetDescriptor descriptor;
    std::vector<std::string> methods;
    std::vector<ScoredText> records;
    std::vector<EnsembleSummary> ensembles;
    evaluation::EvaluationReport report;

    std::string report_json(int indent = 2) const;
    std::string records_jsonl() const;
    std::string records_csv() const;
};

/// Resolves the descriptor and loads the items named by the config.
datasets::Dataset load_for_run(const RunConfig& config, const datasets::DatasetRegistry& registry);

/// Scores every text with every method under a bounded pool of
/// config.parallelism workers, then computes ensemble statistics and the
/// evaluation after all texts are in. Per-text failures are recorded; the
/// run aborts on configuration errors, ReplayMiss, AuthError, and missing
/// logprobs in expected-value mode.
AssessResult assess(const RunConfig& config, const datasets::Dataset& dataset, const Providers& providers);
AssessResult assess(const RunConfig& config, const Providers& providers);

/// Writes report.json, records.jsonl and records.csv into `dir`.
void write_outputs(const AssessResult& result, const std::filesystem::path& dir);

// --------------------------------------------------------------- ablation

struct AblationRow {
    std::string comparison; ///< "expected_vs_vanilla", "scale_vs_arbitrary", "laurae_vs_<x>"
    std::string method_a;
    std::string method_b;
    std::optional<double> metric_a;
    std::optional<double> metric_b;
    std::optional<double> delta; ///< a - b
    std::optional<evaluation::TestResult> test;
    std::optional<std::string> error;
};

struct AblationReport {
    std::string dataset_id;
    std::string metric;
    std::vector<AblationRow> rows;

    std::string to_json(int indent = 2) const;
    std::string to_table() const;
};

/// Paired configurations: expected vs vanilla; the dataset's CEFR-scale
/// prompt vs the arbitrary prompt (CEFR datasets only); LAURAE vs each
/// variant and vs the standalone LLM.
AblationReport ablate(const RunConfig& config, const datasets::Dataset& dataset, const Providers& providers);

// ------------------------------------------------------------ single text

struct SingleScore {
    std::map<std::string, double> scores;
    std::map<std::string, std::string> failures;
    std::optional<double> confidence;
    std::optional<double> entropy;
    std::string to_json(int indent = 2) const;
};

/// Scores one text with non-ensemble methods (ensembles need a dataset).
SingleScore score_single(const std::string& text, Language language, prompting::TemplateId template_id,
                         std::optional<std::string> preamble, const RunConfig& config, const Providers& providers);

} // namespace ara::pipeline
