#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ara/formulas.hpp"
#include "ara/language.hpp"
#include "ara/prompting.hpp"

namespace ara::datasets {

enum class DatasetKind { rating, comparison };
enum class RatingPolarity { higher_is_harder, higher_is_easier };
enum class Simpler { a, b };

std::string_view to_string(DatasetKind k) noexcept;
std::string_view to_string(RatingPolarity p) noexcept;
std::string_view to_string(Simpler s) noexcept;

struct RatingItem {
    std::string id;
    std::string text;
    double rating = 0.0;
    friend bool operator==(const RatingItem&, const RatingItem&) = default;
};

struct ComparisonItem {
    std::string id;
    std::string text_a;
    std::string text_b;
    Simpler simpler = Simpler::a;
    friend bool operator==(const ComparisonItem&, const ComparisonItem&) = default;
};

struct RatingRange {
    double min;
    double max;
};

struct DatasetDescriptor {
    std::string dataset_id;
    Language language = lang::en;
    DatasetKind kind = DatasetKind::rating;
    prompting::ScaleSpec scale = prompting::ScaleSpec::arbitrary(); ///< scale the LLM is asked to use
    prompting::TemplateId prompt_template = prompting::TemplateId::arbitrary;
    std::optional<std::string> preamble;
    formulas::FormulaKind default_formula = formulas::FormulaKind::FKGL;
    RatingPolarity rating_polarity = RatingPolarity::higher_is_harder;
    std::optional<RatingRange> rating_range; ///< bounds on ground-truth ratings; none means unbounded
    std::string ground_truth_field = "rating";

    /// Scale/template consistency and kind-specific fields. Throws InvalidConfig.
    void validate() const;
};

struct Dataset {
    DatasetDescriptor descriptor;
    std::vector<RatingItem> ratings;         ///< filled for rating datasets
    std::vector<ComparisonItem> comparisons; ///< filled for comparison datasets

    std::size_t size() const noexcept {
        return descriptor.kind == DatasetKind::rating ? ratings.size() : comparisons.size();
    }
};

/// JSONL (.jsonl, .json) or CSV with a header row (.csv). Items keep file
/// order. Throws MalformedRecord (with the line number), RatingOutOfScale,
/// DuplicateId.
Dataset load_dataset(const std::filesystem::path& path, const DatasetDescriptor& descriptor);
Dataset parse_jsonl(std::string_view content, const DatasetDescriptor& descriptor);
Dataset parse_csv(std::string_view content, const DatasetDescriptor& descriptor);

/// Canonical JSONL, one object per line.
std::string to_jsonl(const Dataset& dataset);

/// RFC 4180 records: quoted fields may hold commas, doubled quotes and line
/// breaks. Each row carries the line number it starts on.
struct CsvRow {
    std::size_t line;
    std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv_rows(std::string_view content);

class DatasetRegistry {
public:
    /// The fourteen built-in corpora.
    static DatasetRegistry builtin();

    /// Throws DuplicateId for an id already present.
    void add(DatasetDescriptor descriptor);

    /// Adds the descriptors of a JSON extension file:
    /// {"datasets": [{"dataset_id": ..., "language": ..., "kind": ..., ...}]}.
    void load_extension(const std::filesystem::path& path);
    void load_extension_json(std::string_view json_text);

    const DatasetDescriptor& get(std::string_view dataset_id) const; ///< throws UnknownDataset
    bool contains(std::string_view dataset_id) const;
    std::vector<std::string> ids() const;
    std::size_t size() const noexcept { return descriptors_.size(); }

private:
    std::map<std::string, DatasetDescriptor, std::less<>> descriptors_;
};

const DatasetRegistry& registry();

/// A difficulty-aligned view of a ground-truth rating.
double aligned_rating(double rating, RatingPolarity polarity) noexcept;

} // namespace ara::datasets
