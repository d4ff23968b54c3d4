#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace nids {

inline constexpr std::size_t kKddFeatureCount = 41;

enum class Category { Normal, Dos, Probe, R2L, U2R };

inline constexpr Category kAttackCategories[] = {Category::Dos, Category::Probe, Category::R2L,
                                                 Category::U2R};

std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view text);

struct ClassLabel {
    Category category = Category::Normal;
    std::string raw_name;

    bool is_attack() const noexcept { return category != Category::Normal; }
    bool operator==(const ClassLabel&) const = default;
};

/// One KDD-Cup-99 connection record before encoding.
struct RawRecord {
    std::vector<std::string> features;
    std::string label;  // trailing period stripped

    bool operator==(const RawRecord&) const = default;
};

enum class ColumnKind { Numeric, Categorical };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<std::string> vocabulary;  // categorical only; no duplicates
};

struct FeatureSchema {
    std::vector<ColumnSpec> columns;

    /// The 41 columns of the KDD-Cup-99 archive. protocol_type, service and
    /// flag are categorical with empty vocabularies (fit them from data).
    static FeatureSchema kdd99();

    std::size_t encoded_width() const;
};

/// Attack token to category lookup, loaded from "token<ws>category" lines.
class Taxonomy {
public:
    static Taxonomy parse(std::istream& in);
    static Taxonomy load(const std::filesystem::path& path);

    void add(std::string_view token, Category category);

    /// Case-insensitive. A trailing period is ignored. "normal" is always normal.
    ClassLabel map_label(std::string_view raw_name) const;

    const std::map<std::string, Category>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, Category> entries_;
};

/// Describes one column of an encoded dataset.
struct EncodedColumn {
    std::string name;
    std::string source;                // originating raw column
    std::optional<std::string> token;  // set for one-hot indicator columns

    bool operator==(const EncodedColumn&) const = default;
};

using RowId = std::uint64_t;

/// Dense row-major n x d matrix with row identifiers and optional labels.
class NumericDataset {
public:
    NumericDataset() = default;
    NumericDataset(std::size_t cols, std::vector<EncodedColumn> schema = {});

    std::size_t rows() const noexcept { return row_ids_.size(); }
    std::size_t cols() const noexcept { return cols_; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
    double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

    void append(RowId id, std::span<const double> values);
    void append(RowId id, std::span<const double> values, ClassLabel label);

    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<RowId>& row_ids() const noexcept { return row_ids_; }
    const std::vector<EncodedColumn>& schema() const noexcept { return schema_; }

    bool has_labels() const noexcept { return labels_.has_value(); }
    const std::vector<ClassLabel>& labels() const;

    /// Free-form provenance carried into the JSON sidecar (seed, source path...).
    nlohmann::json provenance = nlohmann::json::object();

    /// Rows `indices` in the given order, keeping ids, labels and schema.
    NumericDataset subset(std::span<const std::size_t> indices) const;

    /// Throws NonFiniteData naming the first offending cell.
    void check_finite() const;

private:
    std::size_t cols_ = 0;
    std::vector<double> values_;
    std::vector<RowId> row_ids_;
    std::vector<EncodedColumn> schema_;
    std::optional<std::vector<ClassLabel>> labels_;
};

RawRecord parse_kdd_record(std::string_view line, const FeatureSchema& schema);

/// Inverse of parse_kdd_record: comma-joined features plus "label.".
std::string render_kdd_record(const RawRecord& record);

/// Reads a KDD99 CSV file, plain or gzip-compressed. Blank lines are skipped.
/// Errors carry the 1-based line number.
std::vector<RawRecord> read_kdd_file(const std::filesystem::path& path,
                                     const FeatureSchema& schema);

/// Replaces every categorical vocabulary with the sorted set of tokens seen in
/// `records`.
FeatureSchema fit_vocabularies(std::span<const RawRecord> records, FeatureSchema schema);

/// One-hot encodes categorical columns; numeric columns pass through. Row ids
/// are record positions. Labels are attached when a taxonomy is supplied.
NumericDataset encode_features(std::span<const RawRecord> records, const FeatureSchema& schema,
                               const Taxonomy* taxonomy = nullptr);

enum class SampleStrategy { Uniform, Stratified };

std::string_view to_string(SampleStrategy strategy);
std::optional<SampleStrategy> parse_sample_strategy(std::string_view text);

/// Draws `count` rows without replacement; output keeps input row order.
/// Stratified mode allocates per-category quotas by largest remainder.
NumericDataset sample_dataset(const NumericDataset& dataset, SampleStrategy strategy,
                              std::size_t count, std::uint64_t seed);

/// FNV-1a over shape, row ids and the raw bytes of every value.
std::uint64_t fingerprint(const NumericDataset& dataset);
std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                    std::uint64_t state = 0xcbf29ce484222325ULL);
std::uint64_t hash_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

/// Writes `<path>` (CSV: row_id[,label,category],columns...) and
/// `<path>.json` (schema, row count, provenance).
void write_dataset(const NumericDataset& dataset, const std::filesystem::path& path);
NumericDataset read_dataset(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace nids
