#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ara/cache.hpp"
#include "ara/error.hpp"
#include "ara/pipeline.hpp"
#include "json.hpp"

namespace ara::pipeline {

using nlohmann::json;

Method parse_method(std::string_view name) {
    using ensemble::ShallowSource;
    using ensemble::Variant;
    Method m;
    m.name = std::string(name);
    if (name.starts_with("formula:")) {
        const auto kind = formulas::parse_formula_kind(name.substr(8));
        if (!kind) raise(ErrorCode::InvalidConfig, "unknown formula in method '" + m.name + "'");
        m.kind = MethodKind::formula;
        m.formula = *kind;
        m.name = "formula:" + std::string(formulas::to_string(*kind));
        return m;
    }
    static const std::map<std::string_view, ensemble::EnsembleConfig> ensembles{
        {"laurae", {Variant::laurae, ShallowSource::formula}},
        {"laurae_naive", {Variant::naive, ShallowSource::formula}},
        {"laurae_entropy", {Variant::entropy, ShallowSource::formula}},
        {"laurae_minmax", {Variant::minmax, ShallowSource::formula}},
        {"laurae_agg", {Variant::agg, ShallowSource::formula}},
        {"laurae_rsrs", {Variant::laurae, ShallowSource::rsrs}},
    };
    if (name == "rsrs") {
        m.kind = MethodKind::rsrs;
    } else if (name == "llm_expected") {
        m.kind = MethodKind::llm_expected;
    } else if (name == "llm_vanilla") {
        m.kind = MethodKind::llm_vanilla;
    } else if (auto it = ensembles.find(name); it != ensembles.end()) {
        m.kind = MethodKind::ensemble;
        m.ensemble = it->second;
    } else {
        raise(ErrorCode::InvalidConfig, "unknown method '" + m.name + "'");
    }
    return m;
}

bool MethodPlan::needs_llm() const {
    return std::any_of(methods.begin(), methods.end(), [](const Method& m) {
        return m.kind == MethodKind::llm_expected || m.kind == MethodKind::llm_vanilla;
    });
}

bool MethodPlan::needs_rsrs() const {
    return std::any_of(methods.begin(), methods.end(), [](const Method& m) { return m.kind == MethodKind::rsrs; });
}

bool MethodPlan::has(std::string_view name) const {
    return std::any_of(methods.begin(), methods.end(), [&](const Method& m) { return m.name == name; });
}

MethodPlan plan_methods(const std::vector<std::string>& names) {
    if (names.empty()) raise(ErrorCode::InvalidConfig, "no methods requested");
    MethodPlan plan;
    for (const auto& n : names) {
        auto m = parse_method(n);
        if (plan.has(m.name)) raise(ErrorCode::InvalidConfig, "method '" + m.name + "' listed twice");
        if (m.kind == MethodKind::formula && !plan.formula_source) plan.formula_source = m.name;
        plan.methods.push_back(std::move(m));
    }
    if (plan.has("llm_expected")) {
        plan.llm_source = "llm_expected";
    } else if (plan.has("llm_vanilla")) {
        plan.llm_source = "llm_vanilla";
    }
    for (const auto& m : plan.methods) {
        if (m.kind != MethodKind::ensemble) continue;
        if (!plan.llm_source) {
            raise(ErrorCode::InvalidConfig, "'" + m.name + "' needs llm_expected or llm_vanilla in the method set");
        }
        if (m.ensemble->shallow_source == ensemble::ShallowSource::rsrs) {
            if (!plan.needs_rsrs()) raise(ErrorCode::InvalidConfig, "'" + m.name + "' needs rsrs in the method set");
        } else if (!plan.formula_source) {
            raise(ErrorCode::InvalidConfig, "'" + m.name + "' needs a formula:<kind> method in the method set");
        }
    }
    return plan;
}

// ----------------------------------------------------------------- config

namespace {

std::vector<std::string> split_methods(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

} // namespace

RunConfig RunConfig::from_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("config is not JSON: ") + e.what());
    }
    if (!doc.is_object()) raise(ErrorCode::InvalidConfig, "config must be a JSON object");
    RunConfig c;
    try {
        for (const auto& [key, v] : doc.items()) {
            if (key == "dataset") {
                c.dataset_id = v.get<std::string>();
            } else if (key == "input") {
                c.input_path = v.get<std::string>();
            } else if (key == "registry_extension") {
                c.registry_extension = v.get<std::string>();
            } else if (key == "methods") {
                c.methods = v.is_string() ? split_methods(v.get<std::string>()) : v.get<std::vector<std::string>>();
            } else if (key == "endpoint") {
                c.endpoint = v.get<std::string>();
            } else if (key == "fill_mask_endpoint") {
                c.fill_mask_endpoint = v.get<std::string>();
            } else if (key == "model") {
                c.model_id = v.get<std::string>();
            } else if (key == "top_logprobs") {
                c.top_logprobs_k = v.get<int>();
            } else if (key == "max_tokens") {
                c.max_output_tokens = v.get<int>();
            } else if (key == "context_limit") {
                c.context_limit_tokens = v.get<std::size_t>();
            } else if (key == "cache_dir") {
                c.cache_dir = v.get<std::string>();
            } else if (key == "replay_only") {
                c.replay_only = v.get<bool>();
            } else if (key == "parallelism") {
                c.parallelism = v.get<std::size_t>();
            } else if (key == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else if (key == "template") {
                const auto t = prompting::parse_template_id(v.get<std::string>());
                if (!t) raise(ErrorCode::InvalidConfig, "unknown template '" + v.get<std::string>() + "'");
                c.template_override = *t;
            } else if (key == "renormalize") {
                c.expected_value.renormalize = v.get<bool>();
            } else if (key == "clamp_to_scale") {
                c.expected_value.clamp_to_scale = v.get<bool>();
            } else if (key == "wnll_mode") {
                const auto mode = v.get<std::string>();
                if (mode == "full_vector") {
                    c.wnll_mode = rsrs::WnllMode::full_vector;
                } else if (mode == "target_only") {
                    c.wnll_mode = rsrs::WnllMode::target_only;
                } else {
                    raise(ErrorCode::InvalidConfig, "wnll_mode must be full_vector or target_only");
                }
            } else if (key == "degrade_to_vanilla") {
                c.degrade_to_vanilla = v.get<bool>();
            } else if (key == "max_reasks") {
                c.max_reasks = v.get<int>();
            } else if (key == "out") {
                c.out_dir = v.get<std::string>();
            } else if (key == "format") {
                c.format = v.get<std::string>();
            } else {
                raise(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("config value has the wrong type: ") + e.what());
    }
    if (c.top_logprobs_k < 1 || c.max_output_tokens < 1 || c.max_reasks < 0) {
        raise(ErrorCode::InvalidConfig, "top_logprobs and max_tokens must be positive, max_reasks non-negative");
    }
    if (c.parallelism < 1) raise(ErrorCode::InvalidConfig, "parallelism must be at least 1");
    if (c.format != "json" && c.format != "table") raise(ErrorCode::InvalidConfig, "format must be json or table");
    return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::InvalidConfig, "cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

Providers make_providers(const RunConfig& config) {
    using namespace providers;
    auto env = [](const char* name) {
        const char* v = std::getenv(name);
        return v ? std::string(v) : std::string();
    };
    std::shared_ptr<ResponseCache> cache;
    std::optional<std::filesystem::path> dir = config.cache_dir;
    if (!dir && !env("ARA_CACHE_DIR").empty()) dir = env("ARA_CACHE_DIR");
    if (dir) {
        cache = std::make_shared<ResponseCache>(*dir, config.replay_only ? CacheMode::replay_only : CacheMode::read_write);
    } else if (config.replay_only) {
        raise(ErrorCode::InvalidConfig, "replay-only runs need a cache directory");
    }

    Providers p;
    auto chat_cfg = EndpointConfig::chat_from_env();
    if (!config.endpoint.empty()) chat_cfg.base_url = config.endpoint;
    chat_cfg.context_limit_tokens = config.context_limit_tokens;
    auto mask_cfg = EndpointConfig::fill_mask_from_env();
    if (!config.fill_mask_endpoint.empty()) mask_cfg.base_url = config.fill_mask_endpoint;

    if (config.replay_only) {
        p.chat = std::make_shared<ReplayOnlyChatProvider>();
        p.fill_mask = std::make_shared<ReplayOnlyFillMaskProvider>();
    } else {
        if (!chat_cfg.base_url.empty()) {
            p.chat = std::make_shared<HttpChatProvider>(chat_cfg, make_http_transport(chat_cfg.base_url));
        }
        if (!mask_cfg.base_url.empty()) {
            p.fill_mask = std::make_shared<HttpFillMaskProvider>(mask_cfg, make_http_transport(mask_cfg.base_url));
        }
    }
    if (cache) {
        if (p.chat) p.chat = std::make_shared<CachedChatProvider>(p.chat, cache);
        if (p.fill_mask) p.fill_mask = std::make_shared<CachedFillMaskProvider>(p.fill_mask, cache);
    }
    return p;
}

} // namespace ara::pipeline
