#include <fstream>
#include <iomanip>
#include <sstream>

#include "ara/error.hpp"
#include "ara/pipeline.hpp"
#include "json.hpp"

namespace ara::pipeline {

using nlohmann::ordered_json;

namespace {

template <typename T>
ordered_json opt(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json record_json(const ScoredText& r) {
    ordered_json scores = ordered_json::object();
    for (const auto& [k, v] : r.scores) scores[k] = v;
    ordered_json failures = ordered_json::object();
    for (const auto& [k, v] : r.failures) failures[k] = v;
    return {{"id", r.id},
            {"scores", scores},
            {"failures", failures},
            {"confidence", opt(r.confidence)},
            {"entropy", opt(r.entropy)},
            {"answer", opt(r.answer)},
            {"response_key", opt(r.response_key)},
            {"attempts", r.attempts}};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string num(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << *v;
    return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::InvalidConfig, "cannot write " + path.string());
    out << content;
    if (!out) raise(ErrorCode::InvalidConfig, "write failed for " + path.string());
}

} // namespace

std::string AssessResult::report_json(int indent) const {
    auto doc = ordered_json::parse(report.to_json());
    doc["methods"] = methods;
    auto& fc = doc["failures"] = ordered_json::object();
    for (const auto& m : methods) {
        std::size_t n = 0;
        for (const auto& r : records) n += r.failures.count(m);
        fc[m] = n;
    }
    auto& es = doc["ensembles"] = ordered_json::array();
    for (const auto& e : ensembles) {
        ordered_json j{{"method", e.method}};
        if (e.stats) {
            j["stats"] = {{"mu_llm", e.stats->mu_llm},
                          {"sigma_llm", e.stats->sigma_llm},
                          {"mu_rf", e.stats->mu_rf},
                          {"sigma_rf", e.stats->sigma_rf},
                          {"n", e.stats->n}};
        } else {
            j["stats"] = nullptr;
        }
        if (e.confidences) {
            j["confidences"] = {{"min", e.confidences->min},
                                {"max", e.confidences->max},
                                {"mean", e.confidences->mean},
                                {"n", e.confidences->n}};
        } else {
            j["confidences"] = nullptr;
        }
        j["minmax_fallback"] = e.minmax_fallback;
        j["error"] = opt(e.error);
        es.push_back(std::move(j));
    }
    return doc.dump(indent);
}

std::string AssessResult::records_jsonl() const {
    std::string out;
    for (const auto& r : records) out += record_json(r).dump() + "\n";
    return out;
}

std::string AssessResult::records_csv() const {
    std::ostringstream out;
    out << "id";
    for (const auto& m : methods) out << ',' << csv_field(m);
    out << ",confidence,entropy,answer,response_key,failures\n";
    for (const auto& r : records) {
        out << csv_field(r.id);
        for (const auto& m : methods) {
            out << ',';
            if (auto s = r.score(m)) out << num(*s);
        }
        out << ',' << (r.confidence ? num(*r.confidence) : "") << ',' << (r.entropy ? num(*r.entropy) : "") << ','
            << (r.answer ? std::to_string(*r.answer) : "") << ',' << r.response_key.value_or("") << ',';
        std::string failures;
        for (const auto& [k, v] : r.failures) failures += (failures.empty() ? "" : "; ") + k + ": " + v;
        out << csv_field(failures) << '\n';
    }
    return out.str();
}

void write_outputs(const AssessResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "report.json", result.report_json() + "\n");
    write_file(dir / "records.jsonl", result.records_jsonl());
    write_file(dir / "records.csv", result.records_csv());
}

// --------------------------------------------------------------- ablation

namespace {

struct Source {
    const AssessResult* run;
    std::string method;
    std::string label;
};

/// Re-evaluates two method outputs, possibly from different runs, as one
/// two-method report so the metric and the significance test share items.
evaluation::EvaluationReport head_to_head(const datasets::Dataset& dataset, const Source& a, const Source& b) {
    const auto& desc = dataset.descriptor;
    if (desc.kind == datasets::DatasetKind::rating) {
        std::vector<double> truth;
        for (const auto& item : dataset.ratings) truth.push_back(datasets::aligned_rating(item.rating, desc.rating_polarity));
        evaluation::MethodScores scores;
        for (const auto* s : {&a, &b}) {
            std::vector<std::optional<double>> v;
            for (const auto& r : s->run->records) v.push_back(r.score(s->method));
            scores.emplace_back(s->label, std::move(v));
        }
        return evaluation::evaluate_ratings(desc.dataset_id, scores, truth);
    }
    std::vector<datasets::Simpler> labels;
    for (const auto& item : dataset.comparisons) labels.push_back(item.simpler);
    evaluation::PairScores scores;
    for (const auto* s : {&a, &b}) {
        std::vector<std::optional<std::pair<double, double>>> v;
        const auto& recs = s->run->records;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const auto x = recs[2 * i].score(s->method);
            const auto y = recs[2 * i + 1].score(s->method);
            v.push_back(x && y ? std::optional(std::pair(*x, *y)) : std::nullopt);
        }
        scores.emplace_back(s->label, std::move(v));
    }
    return evaluation::evaluate_comparisons(desc.dataset_id, scores, labels);
}

AblationRow compare(const std::string& name, const datasets::Dataset& dataset, const Source& a, const Source& b) {
    AblationRow row;
    row.comparison = name;
    row.method_a = a.label;
    row.method_b = b.label;
    const auto rep = head_to_head(dataset, a, b);
    const auto* ma = rep.metric(a.label);
    const auto* mb = rep.metric(b.label);
    row.metric_a = ma->value;
    row.metric_b = mb->value;
    if (row.metric_a && row.metric_b) row.delta = *row.metric_a - *row.metric_b;
    if (ma->error) row.error = a.label + ": " + *ma->error;
    if (mb->error) row.error = b.label + ": " + *mb->error;
    if (!rep.tests.empty()) {
        const auto& t = rep.tests.front();
        if (t.error) {
            if (!row.error) row.error = *t.error;
        } else {
            row.test = t.result;
        }
    }
    return row;
}

} // namespace

AblationReport ablate(const RunConfig& config, const datasets::Dataset& dataset, const Providers& providers) {
    const auto& desc = dataset.descriptor;
    const std::string formula = "formula:" + std::string(formulas::to_string(desc.default_formula));
    auto base = config;
    base.template_override.reset();
    base.methods = {formula, "llm_expected", "llm_vanilla", "laurae", "laurae_naive", "laurae_entropy",
                    "laurae_minmax", "laurae_agg"};
    const auto main = assess(base, dataset, providers);

    AblationReport report;
    report.dataset_id = desc.dataset_id;
    report.metric = desc.kind == datasets::DatasetKind::rating ? "pearson" : "pairwise_accuracy";
    auto src = [&](const std::string& m) { return Source{&main, m, m}; };

    report.rows.push_back(compare("expected_vs_vanilla", dataset, src("llm_expected"), src("llm_vanilla")));

    const bool cefr_scale = desc.prompt_template == prompting::TemplateId::cefr ||
                            desc.prompt_template == prompting::TemplateId::cambridge;
    std::optional<AssessResult> arbitrary;
    if (cefr_scale) {
        auto alt = base;
        alt.methods = {"llm_expected"};
        alt.template_override = prompting::TemplateId::arbitrary;
        arbitrary = assess(alt, dataset, providers);
        report.rows.push_back(compare("scale_vs_arbitrary", dataset,
                                      Source{&main, "llm_expected", "llm_expected@scale"},
                                      Source{&*arbitrary, "llm_expected", "llm_expected@arbitrary"}));
    }

    for (const auto* other : {"laurae_naive", "laurae_entropy", "laurae_minmax", "laurae_agg", "llm_expected"}) {
        report.rows.push_back(compare(std::string("laurae_vs_") + other, dataset, src("laurae"), src(other)));
    }
    return report;
}

std::string AblationReport::to_json(int indent) const {
    ordered_json doc;
    doc["dataset_id"] = dataset_id;
    doc["metric"] = metric;
    auto& rs = doc["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json test = nullptr;
        if (r.test) {
            test = {{"test", r.test->test}, {"statistic", r.test->statistic}, {"p_value", r.test->p_value},
                    {"df", opt(r.test->df)}};
        }
        rs.push_back({{"comparison", r.comparison},
                      {"method_a", r.method_a},
                      {"method_b", r.method_b},
                      {"metric_a", opt(r.metric_a)},
                      {"metric_b", opt(r.metric_b)},
                      {"delta", opt(r.delta)},
                      {"test", test},
                      {"error", opt(r.error)}});
    }
    return doc.dump(indent);
}

std::string AblationReport::to_table() const {
    std::ostringstream out;
    out << "ablation on " << dataset_id << " (" << metric << ")\n";
    out << std::left << std::setw(30) << "comparison" << std::setw(10) << "a" << std::setw(10) << "b"
        << std::setw(10) << "delta" << std::setw(15) << "test" << "p\n";
    for (const auto& r : rows) {
        out << std::setw(30) << r.comparison << std::setw(10) << fmt(r.metric_a) << std::setw(10) << fmt(r.metric_b)
            << std::setw(10) << fmt(r.delta) << std::setw(15) << (r.test ? r.test->test : "-")
            << (r.test ? fmt(r.test->p_value) : "-");
        if (r.error) out << "  [" << *r.error << "]";
        out << '\n';
    }
    return out.str();
}

std::string SingleScore::to_json(int indent) const {
    ordered_json doc;
    ordered_json s = ordered_json::object();
    for (const auto& [k, v] : scores) s[k] = v;
    ordered_json f = ordered_json::object();
    for (const auto& [k, v] : failures) f[k] = v;
    doc["scores"] = s;
    doc["failures"] = f;
    doc["confidence"] = opt(confidence);
    doc["entropy"] = opt(entropy);
    return doc.dump(indent);
}

} // namespace ara::pipeline
