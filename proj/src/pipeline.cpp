#include "ara/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "ara/cache.hpp"
#include "ara/error.hpp"
#include "log.hpp"

namespace ara::pipeline {

std::optional<double> ScoredText::score(std::string_view method) const {
    if (auto it = scores.find(std::string(method)); it != scores.end()) return it->second;
    return std::nullopt;
}

namespace {

bool is_fatal(ErrorCode code) {
    switch (code) {
    case ErrorCode::ReplayMiss:
    case ErrorCode::AuthError:
    case ErrorCode::InvalidConfig:
    case ErrorCode::LogprobsUnsupported:
        return true;
    default:
        return false;
    }
}

bool is_parse_failure(ErrorCode code) {
    return code == ErrorCode::MissingAnswerMarker || code == ErrorCode::MissingConfidenceMarker ||
           code == ErrorCode::NonIntegerScore || code == ErrorCode::TopTokenNotNumeric;
}

/// Runs f(0..n-1) on at most `workers` threads. The first exception stops
/// the remaining work and is rethrown after every thread has joined.
template <typename F>
void bounded_for(std::size_t n, std::size_t workers, F&& f) {
    if (n == 0) return;
    workers = std::clamp<std::size_t>(workers, 1, n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        while (!stop.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (std::size_t k = 1; k < workers; ++k) threads.emplace_back(run);
    run();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

struct LlmOutcome {
    std::optional<double> expected;
    std::optional<long long> vanilla;
    std::optional<double> confidence;
    std::optional<double> entropy;
    std::optional<long long> answer;
    std::optional<std::string> key;
    int attempts = 0;
    std::optional<std::string> expected_failure;
    std::optional<std::string> vanilla_failure;
};

std::atomic<bool> g_degrade_warned{false};

LlmOutcome score_with_llm(const std::string& text, const prompting::PromptSpec& spec, const RunConfig& config,
                          providers::ChatProvider& chat) {
    LlmOutcome out;
    const auto prompt = prompting::build_prompt(text, spec);
    if (prompt.marker_collision) {
        detail::logger().warn("text contains an answer marker; the first 'Answer:' in the response is used");
    }
    providers::ChatRequest req;
    req.model_id = config.model_id;
    req.prompt = prompt.text;
    req.top_logprobs_k = config.top_logprobs_k;
    req.max_output_tokens = config.max_output_tokens;

    std::string last_failure;
    for (int attempt = 0; attempt <= config.max_reasks; ++attempt) {
        req.attempt = attempt;
        out.attempts = attempt + 1;
        out.key = providers::CachedChatProvider::cache_key(chat.id(), req);
        try {
            providers::ChatResponse resp;
            try {
                resp = chat.complete(req);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::LogprobsUnsupported || !req.require_logprobs || !config.degrade_to_vanilla) {
                    throw;
                }
                if (!g_degrade_warned.exchange(true)) {
                    detail::logger().warn("endpoint returns no logprobs; degrading to vanilla scores from the "
                                          "sampled answer, expected-value scores are unavailable");
                }
                req.require_logprobs = false;
                out.key = providers::CachedChatProvider::cache_key(chat.id(), req);
                resp = chat.complete(req);
            }
            const auto parsed = scoring::parse_response(resp.text, resp.tokens);
            out.answer = parsed.score_value;
            if (!req.require_logprobs) {
                out.vanilla = parsed.score_value;
                out.confidence = std::clamp(static_cast<double>(parsed.confidence_value) / 10.0, 0.0, 1.0);
                out.expected_failure = "LogprobsUnsupported: no token alternatives";
                return out;
            }
            if (!parsed.score_token_position || *parsed.score_token_position >= resp.token_logprobs.size()) {
                raise(ErrorCode::MissingAnswerMarker, "score digits not found in the token stream");
            }
            const auto& score_dist = resp.token_logprobs[*parsed.score_token_position];
            out.expected = scoring::expected_value_score(score_dist, spec.scale, config.expected_value);
            out.vanilla = scoring::vanilla_score(score_dist);
            out.entropy = scoring::normalized_entropy(score_dist);
            if (parsed.confidence_token_position && *parsed.confidence_token_position < resp.token_logprobs.size()) {
                out.confidence = std::clamp(
                    scoring::confidence_weight(resp.token_logprobs[*parsed.confidence_token_position]), 0.0, 1.0);
            } else {
                out.confidence = std::clamp(static_cast<double>(parsed.confidence_value) / 10.0, 0.0, 1.0);
            }
            return out;
        } catch (const Error& e) {
            if (!is_parse_failure(e.code())) throw;
            last_failure = e.what();
            auto key = out.key;
            out = LlmOutcome{};
            out.attempts = attempt + 1;
            out.key = std::move(key);
            if (attempt < config.max_reasks) {
                detail::logger().warn("unparseable response ({}); asking again", e.what());
            }
        }
    }
    out.expected_failure = last_failure;
    out.vanilla_failure = last_failure;
    return out;
}

struct Unit {
    std::string id;
    const std::string* text;
};

std::vector<Unit> units_of(const datasets::Dataset& d) {
    std::vector<Unit> units;
    if (d.descriptor.kind == datasets::DatasetKind::rating) {
        for (const auto& item : d.ratings) units.push_back({item.id, &item.text});
    } else {
        for (const auto& item : d.comparisons) {
            units.push_back({item.id + "#a", &item.text_a});
            units.push_back({item.id + "#b", &item.text_b});
        }
    }
    return units;
}

void fail_or_throw(const Error& e, ScoredText& rec, const std::string& method) {
    if (is_fatal(e.code())) throw;
    rec.failures[method] = e.what();
}

ScoredText score_unit(const Unit& unit, Language language, const prompting::PromptSpec& spec, const MethodPlan& plan,
                      const RunConfig& config, const Providers& providers) {
    ScoredText rec;
    rec.id = unit.id;
    for (const auto& m : plan.methods) {
        if (m.kind != MethodKind::formula) continue;
        try {
            rec.scores[m.name] = formulas::score_text(*unit.text, language, *m.formula).difficulty_value;
        } catch (const Error& e) {
            fail_or_throw(e, rec, m.name);
        }
    }
    if (plan.needs_rsrs()) {
        try {
            rec.scores["rsrs"] =
                rsrs::document_rsrs(*unit.text, language, *providers.fill_mask, {config.wnll_mode}).value;
        } catch (const Error& e) {
            fail_or_throw(e, rec, "rsrs");
        }
    }
    if (plan.needs_llm()) {
        try {
            const auto o = score_with_llm(*unit.text, spec, config, *providers.chat);
            rec.confidence = o.confidence;
            rec.entropy = o.entropy;
            rec.answer = o.answer;
            rec.response_key = o.key;
            rec.attempts = o.attempts;
            if (plan.has("llm_expected")) {
                if (o.expected) {
                    rec.scores["llm_expected"] = *o.expected;
                } else {
                    rec.failures["llm_expected"] = o.expected_failure.value_or("no score");
                }
            }
            if (plan.has("llm_vanilla")) {
                if (o.vanilla) {
                    rec.scores["llm_vanilla"] = static_cast<double>(*o.vanilla);
                } else {
                    rec.failures["llm_vanilla"] = o.vanilla_failure.value_or("no score");
                }
            }
        } catch (const Error& e) {
            if (is_fatal(e.code())) throw;
            for (const auto* name : {"llm_expected", "llm_vanilla"}) {
                if (plan.has(name)) rec.failures[name] = e.what();
            }
        }
    }
    return rec;
}

EnsembleSummary run_ensemble(const Method& m, const MethodPlan& plan, std::vector<ScoredText>& records) {
    using ensemble::Variant;
    EnsembleSummary summary;
    summary.method = m.name;
    const auto& cfg = *m.ensemble;
    const std::string llm = *plan.llm_source;
    const std::string shallow = cfg.shallow_source == ensemble::ShallowSource::rsrs ? "rsrs" : *plan.formula_source;
    const bool needs_c = cfg.variant == Variant::laurae || cfg.variant == Variant::minmax || cfg.variant == Variant::agg;
    const bool needs_h = cfg.variant == Variant::entropy;

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        std::string missing;
        if (!r.score(llm)) {
            missing = llm;
        } else if (!r.score(shallow)) {
            missing = shallow;
        } else if (needs_c && !r.confidence) {
            missing = "confidence";
        } else if (needs_h && !r.entropy) {
            missing = "entropy";
        }
        if (missing.empty()) {
            eligible.push_back(i);
        } else {
            r.failures[m.name] = "missing " + missing;
        }
    }
    auto fail_all = [&](const std::string& why) {
        summary.error = why;
        for (auto i : eligible) records[i].failures[m.name] = why;
    };
    if (eligible.size() < 2) {
        fail_all("PreconditionViolation: fewer than two texts have every input");
        return summary;
    }

    ensemble::Vector llm_v(static_cast<Eigen::Index>(eligible.size()));
    ensemble::Vector rf_v(llm_v.size());
    ensemble::Vector c_v(llm_v.size());
    for (std::size_t k = 0; k < eligible.size(); ++k) {
        const auto& r = records[eligible[k]];
        llm_v[static_cast<Eigen::Index>(k)] = *r.score(llm);
        rf_v[static_cast<Eigen::Index>(k)] = *r.score(shallow);
        c_v[static_cast<Eigen::Index>(k)] = r.confidence.value_or(0.0);
    }
    ensemble::DatasetStats stats;
    try {
        stats = ensemble::dataset_stats(llm_v, rf_v);
    } catch (const Error& e) {
        fail_all(e.what());
        return summary;
    }
    summary.stats = stats;
    ensemble::ConfidenceSummary conf;
    if (needs_c) {
        conf = ensemble::summarize_confidences(c_v);
        summary.confidences = conf;
        summary.minmax_fallback = cfg.variant == Variant::minmax && ensemble::minmax_degenerate(conf);
    }
    for (std::size_t k = 0; k < eligible.size(); ++k) {
        auto& r = records[eligible[k]];
        const double w = ensemble::variant_weight(cfg.variant, {r.confidence, r.entropy}, conf);
        r.scores[m.name] = ensemble::laurae_score(*r.score(llm), *r.score(shallow), w, stats);
    }
    return summary;
}

} // namespace

datasets::Dataset load_for_run(const RunConfig& config, const datasets::DatasetRegistry& registry) {
    auto reg = registry;
    if (config.registry_extension) reg.load_extension(*config.registry_extension);
    if (!config.input_path) {
        raise(ErrorCode::InvalidConfig, "an input file is required (corpora are not bundled)");
    }
    datasets::DatasetDescriptor descriptor;
    if (config.dataset_id) {
        descriptor = reg.get(*config.dataset_id);
    } else {
        descriptor.dataset_id = config.input_path->stem().string();
        descriptor.rating_range.reset();
    }
    return datasets::load_dataset(*config.input_path, descriptor);
}

AssessResult assess(const RunConfig& config, const datasets::Dataset& dataset, const Providers& providers) {
    const auto plan = plan_methods(config.methods);
    if (plan.needs_llm() && !providers.chat) {
        raise(ErrorCode::InvalidConfig, "LLM methods need a chat endpoint (--endpoint or ARA_ENDPOINT)");
    }
    if (plan.needs_rsrs() && !providers.fill_mask) {
        raise(ErrorCode::InvalidConfig, "rsrs needs a fill-mask endpoint (ARA_FILL_MASK_ENDPOINT)");
    }
    const auto& desc = dataset.descriptor;
    const auto tmpl = config.template_override.value_or(desc.prompt_template);
    const auto spec = prompting::PromptSpec::make(tmpl, desc.preamble);

    AssessResult result;
    result.descriptor = desc;
    for (const auto& m : plan.methods) result.methods.push_back(m.name);

    const auto units = units_of(dataset);
    result.records.resize(units.size());
    bounded_for(units.size(), config.parallelism, [&](std::size_t i) {
        result.records[i] = score_unit(units[i], desc.language, spec, plan, config, providers);
    });

    // Everything below runs after the barrier, single-threaded.
    for (const auto& m : plan.methods) {
        if (m.kind == MethodKind::ensemble) result.ensembles.push_back(run_ensemble(m, plan, result.records));
    }

    if (desc.kind == datasets::DatasetKind::rating) {
        std::vector<double> truth;
        for (const auto& item : dataset.ratings) truth.push_back(datasets::aligned_rating(item.rating, desc.rating_polarity));
        evaluation::MethodScores scores;
        for (const auto& m : plan.methods) {
            std::vector<std::optional<double>> v;
            for (const auto& r : result.records) v.push_back(r.score(m.name));
            scores.emplace_back(m.name, std::move(v));
        }
        result.report = evaluation::evaluate_ratings(desc.dataset_id, scores, truth);
        for (const auto* llm : {"llm_expected", "llm_vanilla"}) {
            if (!plan.has(llm)) continue;
            std::vector<double> s, c, t;
            for (std::size_t i = 0; i < result.records.size(); ++i) {
                const auto& r = result.records[i];
                if (r.score(llm) && r.confidence) {
                    s.push_back(*r.score(llm));
                    c.push_back(*r.confidence);
                    t.push_back(truth[i]);
                }
            }
            if (s.size() >= 12) result.report.quartiles[llm] = evaluation::confidence_quartile_analysis(s, c, t);
        }
    } else {
        std::vector<datasets::Simpler> labels;
        for (const auto& item : dataset.comparisons) labels.push_back(item.simpler);
        evaluation::PairScores scores;
        for (const auto& m : plan.methods) {
            std::vector<std::optional<std::pair<double, double>>> v;
            for (std::size_t i = 0; i < dataset.comparisons.size(); ++i) {
                const auto a = result.records[2 * i].score(m.name);
                const auto b = result.records[2 * i + 1].score(m.name);
                v.push_back(a && b ? std::optional(std::pair(*a, *b)) : std::nullopt);
            }
            scores.emplace_back(m.name, std::move(v));
        }
        result.report = evaluation::evaluate_comparisons(desc.dataset_id, scores, labels);
    }
    for (const auto& m : result.report.metrics) {
        if (m.scored + m.unscored != result.report.items) {
            raise(ErrorCode::PreconditionViolation, "method '" + m.method + "' lost track of items");
        }
    }
    return result;
}

AssessResult assess(const RunConfig& config, const Providers& providers) {
    return assess(config, load_for_run(config, datasets::registry()), providers);
}

SingleScore score_single(const std::string& text, Language language, prompting::TemplateId template_id,
                         std::optional<std::string> preamble, const RunConfig& config, const Providers& providers) {
    const auto plan = plan_methods(config.methods);
    for (const auto& m : plan.methods) {
        if (m.kind == MethodKind::ensemble) {
            raise(ErrorCode::InvalidConfig, "'" + m.name + "' needs dataset statistics; use assess");
        }
    }
    if (plan.needs_llm() && !providers.chat) raise(ErrorCode::InvalidConfig, "LLM methods need a chat endpoint");
    if (plan.needs_rsrs() && !providers.fill_mask) raise(ErrorCode::InvalidConfig, "rsrs needs a fill-mask endpoint");
    const auto spec = prompting::PromptSpec::make(template_id, std::move(preamble));
    const auto rec = score_unit({"text", &text}, language, spec, plan, config, providers);
    return {rec.scores, rec.failures, rec.confidence, rec.entropy};
}

} // namespace ara::pipeline
