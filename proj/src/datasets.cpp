#include "ara/datasets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ara/error.hpp"
#include "json.hpp"

namespace ara::datasets {

using nlohmann::json;
using prompting::ScaleSpec;
using prompting::TemplateId;

std::string_view to_string(DatasetKind k) noexcept { return k == DatasetKind::rating ? "rating" : "comparison"; }

std::string_view to_string(RatingPolarity p) noexcept {
    return p == RatingPolarity::higher_is_harder ? "higher_is_harder" : "higher_is_easier";
}

std::string_view to_string(Simpler s) noexcept { return s == Simpler::a ? "a" : "b"; }

double aligned_rating(double rating, RatingPolarity polarity) noexcept {
    return polarity == RatingPolarity::higher_is_harder ? rating : -rating;
}

void DatasetDescriptor::validate() const {
    auto fail = [&](const std::string& why) { raise(ErrorCode::InvalidConfig, "dataset '" + dataset_id + "': " + why); };
    if (dataset_id.empty()) fail("empty dataset_id");
    const bool cefr_scale = scale == ScaleSpec::cefr() || scale == ScaleSpec::cambridge();
    if (cefr_scale) {
        const auto expected = scale == ScaleSpec::cefr() ? TemplateId::cefr : TemplateId::cambridge;
        if (prompt_template != expected) fail("a CEFR-scale dataset binds to the matching CEFR template");
    } else if (prompt_template != TemplateId::arbitrary) {
        fail("a non-CEFR dataset binds to the arbitrary template");
    }
    if (rating_range && !(rating_range->min < rating_range->max)) fail("rating range must have min < max");
    if (kind == DatasetKind::rating && ground_truth_field.empty()) fail("empty ground_truth_field");
}

// ------------------------------------------------------------- loading

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
    raise(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": " + why);
}

class Builder {
public:
    explicit Builder(const DatasetDescriptor& d) { out_.descriptor = d; }

    void rating(std::size_t line, std::string id, std::string text, double rating) {
        check_id(line, id);
        if (text.empty()) malformed(line, "empty text");
        if (!std::isfinite(rating)) malformed(line, "rating is not a finite number");
        if (const auto& r = out_.descriptor.rating_range; r && (rating < r->min || rating > r->max)) {
            std::ostringstream msg;
            msg << "line " << line << ": rating " << rating << " outside [" << r->min << ", " << r->max << "] of '"
                << out_.descriptor.dataset_id << "'";
            raise(ErrorCode::RatingOutOfScale, msg.str());
        }
        out_.ratings.push_back({std::move(id), std::move(text), rating});
    }

    void comparison(std::size_t line, std::string id, std::string a, std::string b, std::string_view simpler) {
        check_id(line, id);
        if (a.empty() || b.empty()) malformed(line, "empty text");
        if (a == b) malformed(line, "text_a and text_b are identical");
        Simpler s;
        if (simpler == "a") {
            s = Simpler::a;
        } else if (simpler == "b") {
            s = Simpler::b;
        } else {
            malformed(line, "simpler must be \"a\" or \"b\"");
        }
        out_.comparisons.push_back({std::move(id), std::move(a), std::move(b), s});
    }

    Dataset take() { return std::move(out_); }

private:
    void check_id(std::size_t line, const std::string& id) {
        if (id.empty()) malformed(line, "empty id");
        if (!seen_.insert(id).second) {
            raise(ErrorCode::DuplicateId, "line " + std::to_string(line) + ": id '" + id + "' repeats");
        }
    }

    Dataset out_;
    std::set<std::string> seen_;
};

std::string json_string(const json& obj, const char* field, std::size_t line) {
    auto it = obj.find(field);
    if (it == obj.end()) malformed(line, std::string("missing field '") + field + "'");
    if (it->is_string()) return it->get<std::string>();
    if (std::string_view(field) == "id" && it->is_number_integer()) return std::to_string(it->get<long long>());
    malformed(line, std::string("field '") + field + "' must be a string");
}

double parse_number(std::string_view s, std::size_t line, std::string_view field) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        malformed(line, "field '" + std::string(field) + "' is not a number: '" + std::string(s) + "'");
    }
    return v;
}

} // namespace

Dataset parse_jsonl(std::string_view content, const DatasetDescriptor& descriptor) {
    descriptor.validate();
    Builder builder(descriptor);
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        ++line_no;
        std::string_view line = content.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            if (end == content.size()) break;
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            malformed(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) malformed(line_no, "expected a JSON object");

        if (descriptor.kind == DatasetKind::rating) {
            const auto& field = descriptor.ground_truth_field;
            auto r = obj.find(field);
            if (r == obj.end()) malformed(line_no, "missing field '" + field + "'");
            double rating = 0.0;
            if (r->is_number()) {
                rating = r->get<double>();
            } else if (r->is_string()) {
                rating = parse_number(r->get<std::string>(), line_no, field);
            } else {
                malformed(line_no, "field '" + field + "' must be a number");
            }
            builder.rating(line_no, json_string(obj, "id", line_no), json_string(obj, "text", line_no), rating);
        } else {
            builder.comparison(line_no, json_string(obj, "id", line_no), json_string(obj, "text_a", line_no),
                               json_string(obj, "text_b", line_no), json_string(obj, "simpler", line_no));
        }
        if (end == content.size()) break;
    }
    return builder.take();
}

std::vector<CsvRow> parse_csv_rows(std::string_view content) {
    std::vector<CsvRow> rows;
    CsvRow row{1, {}};
    std::string field;
    std::size_t line = 1;
    bool quoted = false;
    bool field_started = false;
    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.fields.size() == 1 && row.fields[0].empty())) rows.push_back(std::move(row));
        row = CsvRow{line, {}};
    };
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char ch = content[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
        case '"':
            if (field_started && !field.empty()) malformed(line, "stray quote inside an unquoted field");
            quoted = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            break;
        case '\n':
            ++line;
            end_row();
            break;
        default:
            field.push_back(ch);
            field_started = true;
        }
    }
    if (quoted) malformed(row.line, "unterminated quoted field");
    if (field_started || !row.fields.empty()) end_row();
    return rows;
}

Dataset parse_csv(std::string_view content, const DatasetDescriptor& descriptor) {
    descriptor.validate();
    auto rows = parse_csv_rows(content);
    if (rows.empty()) malformed(1, "missing header row");
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < rows[0].fields.size(); ++i) column[rows[0].fields[i]] = i;

    const std::vector<std::string> needed =
        descriptor.kind == DatasetKind::rating
            ? std::vector<std::string>{"id", "text", descriptor.ground_truth_field}
            : std::vector<std::string>{"id", "text_a", "text_b", "simpler"};
    for (const auto& name : needed) {
        if (!column.count(name)) malformed(1, "header lacks column '" + name + "'");
    }

    Builder builder(descriptor);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != rows[0].fields.size()) {
            malformed(row.line, "expected " + std::to_string(rows[0].fields.size()) + " fields, found " +
                                    std::to_string(row.fields.size()));
        }
        auto get = [&](const std::string& name) { return row.fields[column.at(name)]; };
        if (descriptor.kind == DatasetKind::rating) {
            builder.rating(row.line, get("id"), get("text"),
                           parse_number(get(descriptor.ground_truth_field), row.line, descriptor.ground_truth_field));
        } else {
            builder.comparison(row.line, get("id"), get("text_a"), get("text_b"), get("simpler"));
        }
    }
    return builder.take();
}

Dataset load_dataset(const std::filesystem::path& path, const DatasetDescriptor& descriptor) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::InvalidConfig, "cannot read dataset file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto ext = path.extension().string();
    if (ext == ".csv") return parse_csv(buf.str(), descriptor);
    if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return parse_jsonl(buf.str(), descriptor);
    raise(ErrorCode::InvalidConfig, "unrecognized dataset extension '" + ext + "' (use .jsonl or .csv)");
}

std::string to_jsonl(const Dataset& dataset) {
    std::string out;
    if (dataset.descriptor.kind == DatasetKind::rating) {
        for (const auto& item : dataset.ratings) {
            json obj{{"id", item.id}, {"text", item.text}};
            obj[dataset.descriptor.ground_truth_field] = item.rating;
            out += obj.dump() + "\n";
        }
    } else {
        for (const auto& item : dataset.comparisons) {
            out += json{{"id", item.id}, {"text_a", item.text_a}, {"text_b", item.text_b},
                        {"simpler", std::string(to_string(item.simpler))}}
                       .dump() +
                   "\n";
        }
    }
    return out;
}

// ------------------------------------------------------------ registry

namespace {

DatasetDescriptor builtin(std::string id, Language language, DatasetKind kind, TemplateId tmpl,
                          formulas::FormulaKind formula, std::optional<RatingRange> range,
                          RatingPolarity polarity = RatingPolarity::higher_is_harder) {
    DatasetDescriptor d;
    d.dataset_id = std::move(id);
    d.language = language;
    d.kind = kind;
    d.prompt_template = tmpl;
    d.scale = tmpl == TemplateId::cefr        ? ScaleSpec::cefr()
              : tmpl == TemplateId::cambridge ? ScaleSpec::cambridge()
                                              : ScaleSpec::arbitrary();
    d.preamble = prompting::preamble_for_dataset(d.dataset_id);
    d.default_formula = formula;
    d.rating_range = range;
    d.rating_polarity = polarity;
    return d;
}

} // namespace

DatasetRegistry DatasetRegistry::builtin() {
    using formulas::FormulaKind;
    using K = DatasetKind;
    using T = TemplateId;
    const RatingRange cefr{1, 6};
    DatasetRegistry r;
    r.add(datasets::builtin("readme_en", lang::en, K::rating, T::cefr, FormulaKind::FKGL, cefr));
    r.add(datasets::builtin("readme_fr", lang::fr, K::rating, T::cefr, FormulaKind::FRE_FR, cefr));
    r.add(datasets::builtin("readme_hi", lang::hi, K::rating, T::cefr, FormulaKind::LIX, cefr));
    r.add(datasets::builtin("readme_ar", lang::ar, K::rating, T::cefr, FormulaKind::OSMAN, cefr));
    r.add(datasets::builtin("readme_ru", lang::ru, K::rating, T::cefr, FormulaKind::FRE_RU, cefr));
    r.add(datasets::builtin("medreadme", lang::en, K::rating, T::cefr, FormulaKind::FKGL, cefr));
    r.add(datasets::builtin("cambridge", lang::en, K::rating, T::cambridge, FormulaKind::FKGL, RatingRange{1, 5}));
    // CLEAR's ground truth is an easiness estimate: higher means easier.
    r.add(datasets::builtin("clear", lang::en, K::rating, T::arbitrary, FormulaKind::FKGL, std::nullopt,
                            RatingPolarity::higher_is_easier));
    r.add(datasets::builtin("onestop", lang::en, K::rating, T::arbitrary, FormulaKind::FKGL, RatingRange{0, 2}));
    r.add(datasets::builtin("greek_language", lang::el, K::rating, T::arbitrary, FormulaKind::LIX, RatingRange{2, 6}));
    r.add(datasets::builtin("greek_history", lang::el, K::rating, T::arbitrary, FormulaKind::LIX, RatingRange{4, 12}));
    r.add(datasets::builtin("asset", lang::en, K::comparison, T::arbitrary, FormulaKind::FKGL, std::nullopt));
    r.add(datasets::builtin("vikidia_en", lang::en, K::comparison, T::arbitrary, FormulaKind::FKGL, std::nullopt));
    r.add(datasets::builtin("vikidia_fr", lang::fr, K::comparison, T::arbitrary, FormulaKind::FRE_FR, std::nullopt));
    return r;
}

void DatasetRegistry::add(DatasetDescriptor descriptor) {
    descriptor.validate();
    if (descriptors_.count(descriptor.dataset_id)) {
        raise(ErrorCode::DuplicateId, "dataset '" + descriptor.dataset_id + "' is already registered");
    }
    auto id = descriptor.dataset_id;
    descriptors_.emplace(std::move(id), std::move(descriptor));
}

void DatasetRegistry::load_extension(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::InvalidConfig, "cannot read registry extension " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    load_extension_json(buf.str());
}

void DatasetRegistry::load_extension_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("registry extension is not JSON: ") + e.what());
    }
    try {
        for (const auto& e : doc.at("datasets")) {
            DatasetDescriptor d;
            d.dataset_id = e.at("dataset_id").get<std::string>();
            d.language = Language::from_string(e.at("language").get<std::string>());
            const auto kind = e.at("kind").get<std::string>();
            if (kind != "rating" && kind != "comparison") {
                raise(ErrorCode::InvalidConfig, "kind must be rating or comparison");
            }
            d.kind = kind == "rating" ? DatasetKind::rating : DatasetKind::comparison;
            const auto tmpl = prompting::parse_template_id(e.value("prompt_template", "arbitrary"));
            if (!tmpl) raise(ErrorCode::InvalidConfig, "unknown prompt_template");
            d.prompt_template = *tmpl;
            d.scale = *tmpl == TemplateId::cefr        ? ScaleSpec::cefr()
                      : *tmpl == TemplateId::cambridge ? ScaleSpec::cambridge()
                                                       : ScaleSpec::arbitrary();
            if (auto p = e.find("preamble"); p != e.end() && !p->is_null()) d.preamble = p->get<std::string>();
            const auto formula = formulas::parse_formula_kind(
                e.value("default_formula", std::string(formulas::to_string(formulas::default_formula_for(d.language)))));
            if (!formula) raise(ErrorCode::InvalidConfig, "unknown default_formula");
            d.default_formula = *formula;
            const auto polarity = e.value("rating_polarity", "higher_is_harder");
            if (polarity != "higher_is_harder" && polarity != "higher_is_easier") {
                raise(ErrorCode::InvalidConfig, "rating_polarity must be higher_is_harder or higher_is_easier");
            }
            d.rating_polarity =
                polarity == "higher_is_harder" ? RatingPolarity::higher_is_harder : RatingPolarity::higher_is_easier;
            if (auto range = e.find("rating_range"); range != e.end() && !range->is_null()) {
                d.rating_range = RatingRange{range->at(0).get<double>(), range->at(1).get<double>()};
            }
            d.ground_truth_field = e.value("ground_truth_field", "rating");
            add(std::move(d));
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("malformed registry extension: ") + e.what());
    }
}

const DatasetDescriptor& DatasetRegistry::get(std::string_view dataset_id) const {
    auto it = descriptors_.find(dataset_id);
    if (it == descriptors_.end()) raise(ErrorCode::UnknownDataset, "no dataset '" + std::string(dataset_id) + "'");
    return it->second;
}

bool DatasetRegistry::contains(std::string_view dataset_id) const { return descriptors_.find(dataset_id) != descriptors_.end(); }

std::vector<std::string> DatasetRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : descriptors_) out.push_back(id);
    return out;
}

const DatasetRegistry& registry() {
    static const DatasetRegistry instance = DatasetRegistry::builtin();
    return instance;
}

} // namespace ara::datasets
