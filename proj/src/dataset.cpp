#include "nids/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <zlib.h>

#include "nids/error.hpp"
#include "nids/io.hpp"

namespace nids {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

constexpr const char* kKddColumnNames[kKddFeatureCount] = {
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
};

}  // namespace

std::string_view to_string(Category category) {
    switch (category) {
        case Category::Normal: return "normal";
        case Category::Dos: return "dos";
        case Category::Probe: return "probe";
        case Category::R2L: return "r2l";
        case Category::U2R: return "u2r";
    }
    return "normal";
}

std::optional<Category> parse_category(std::string_view text) {
    auto t = lower(trim(text));
    if (t == "normal") return Category::Normal;
    if (t == "dos") return Category::Dos;
    if (t == "probe") return Category::Probe;
    if (t == "r2l") return Category::R2L;
    if (t == "u2r") return Category::U2R;
    return std::nullopt;
}

FeatureSchema FeatureSchema::kdd99() {
    FeatureSchema schema;
    schema.columns.reserve(kKddFeatureCount);
    for (std::size_t i = 0; i < kKddFeatureCount; ++i) {
        ColumnSpec col;
        col.name = kKddColumnNames[i];
        col.kind = (i >= 1 && i <= 3) ? ColumnKind::Categorical : ColumnKind::Numeric;
        schema.columns.push_back(std::move(col));
    }
    return schema;
}

std::size_t FeatureSchema::encoded_width() const {
    std::size_t width = 0;
    for (const auto& col : columns) {
        width += col.kind == ColumnKind::Numeric ? 1 : col.vocabulary.size();
    }
    return width;
}

// ---------------------------------------------------------------------------
// Taxonomy

Taxonomy Taxonomy::parse(std::istream& in) {
    Taxonomy tax;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        std::istringstream fields{std::string(view)};
        std::string token, category, extra;
        fields >> token >> category;
        if (token.empty() || category.empty() || (fields >> extra)) {
            throw Error(ErrorCode::DataError,
                        "taxonomy line " + std::to_string(line_no) + ": expected 'token category'");
        }
        auto cat = parse_category(category);
        if (!cat) {
            throw Error(ErrorCode::DataError, "taxonomy line " + std::to_string(line_no) +
                                                  ": unknown category '" + category + "'");
        }
        tax.add(token, *cat);
    }
    return tax;
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::DataError, "cannot open taxonomy " + path.string());
    }
    return parse(in);
}

void Taxonomy::add(std::string_view token, Category category) {
    auto key = lower(trim(token));
    if (!key.empty() && key.back() == '.') key.pop_back();
    entries_[key] = category;
}

ClassLabel Taxonomy::map_label(std::string_view raw_name) const {
    auto name = trim(raw_name);
    if (!name.empty() && name.back() == '.') name.remove_suffix(1);
    auto key = lower(name);
    if (key == "normal") return {Category::Normal, std::string(name)};
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw Error(ErrorCode::UnknownLabel, "'" + std::string(name) + "' is not in the taxonomy");
    }
    return {it->second, std::string(name)};
}

// ---------------------------------------------------------------------------
// NumericDataset

NumericDataset::NumericDataset(std::size_t cols, std::vector<EncodedColumn> schema)
    : cols_(cols), schema_(std::move(schema)) {
    if (schema_.empty()) {
        for (std::size_t j = 0; j < cols_; ++j) {
            auto name = "f" + std::to_string(j);
            schema_.push_back({name, name, std::nullopt});
        }
    }
    if (schema_.size() != cols_) {
        throw Error(ErrorCode::DimensionMismatch, "schema has " + std::to_string(schema_.size()) +
                                                      " columns, dataset " + std::to_string(cols_));
    }
}

void NumericDataset::append(RowId id, std::span<const double> values) {
    if (values.size() != cols_) {
        throw Error(ErrorCode::DimensionMismatch, "row of width " + std::to_string(values.size()) +
                                                      ", expected " + std::to_string(cols_));
    }
    if (labels_) {
        throw Error(ErrorCode::MissingLabels, "labelled dataset requires a label per row");
    }
    values_.insert(values_.end(), values.begin(), values.end());
    row_ids_.push_back(id);
}

void NumericDataset::append(RowId id, std::span<const double> values, ClassLabel label) {
    if (values.size() != cols_) {
        throw Error(ErrorCode::DimensionMismatch, "row of width " + std::to_string(values.size()) +
                                                      ", expected " + std::to_string(cols_));
    }
    if (!labels_) {
        if (!row_ids_.empty()) {
            throw Error(ErrorCode::MissingLabels, "cannot add a label to an unlabelled dataset");
        }
        labels_.emplace();
    }
    values_.insert(values_.end(), values.begin(), values.end());
    row_ids_.push_back(id);
    labels_->push_back(std::move(label));
}

const std::vector<ClassLabel>& NumericDataset::labels() const {
    if (!labels_) throw Error(ErrorCode::MissingLabels, "dataset carries no labels");
    return *labels_;
}

NumericDataset NumericDataset::subset(std::span<const std::size_t> indices) const {
    NumericDataset out(cols_, schema_);
    out.provenance = provenance;
    out.values_.reserve(indices.size() * cols_);
    out.row_ids_.reserve(indices.size());
    if (labels_) out.labels_.emplace().reserve(indices.size());
    for (auto i : indices) {
        auto r = row(i);
        out.values_.insert(out.values_.end(), r.begin(), r.end());
        out.row_ids_.push_back(row_ids_[i]);
        if (labels_) out.labels_->push_back((*labels_)[i]);
    }
    return out;
}

void NumericDataset::check_finite() const {
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            throw Error(ErrorCode::NonFiniteData,
                        "row " + std::to_string(k / cols_) + " column " + std::to_string(k % cols_));
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

RawRecord parse_kdd_record(std::string_view line, const FeatureSchema& schema) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
    auto fields = split_commas(line);
    const auto expected = schema.columns.size() + 1;
    if (fields.size() != expected) {
        throw Error(ErrorCode::FieldCountMismatch, "expected " + std::to_string(expected) +
                                                       " fields, got " +
                                                       std::to_string(fields.size()));
    }
    RawRecord rec;
    rec.features.reserve(schema.columns.size());
    for (std::size_t j = 0; j < schema.columns.size(); ++j) {
        auto field = trim(fields[j]);
        if (schema.columns[j].kind == ColumnKind::Numeric && !parse_number(field)) {
            throw Error(ErrorCode::NumericParseError,
                        "column " + std::to_string(j) + " (" + schema.columns[j].name + "): '" +
                            std::string(field) + "'");
        }
        rec.features.emplace_back(field);
    }
    auto label = trim(fields.back());
    if (!label.empty() && label.back() == '.') label.remove_suffix(1);
    if (label.empty()) {
        throw Error(ErrorCode::DataError, "empty label");
    }
    rec.label = std::string(label);
    return rec;
}

std::string render_kdd_record(const RawRecord& record) {
    std::string out;
    for (const auto& f : record.features) {
        out += f;
        out += ',';
    }
    out += record.label;
    out += '.';
    return out;
}

std::vector<RawRecord> read_kdd_file(const std::filesystem::path& path,
                                     const FeatureSchema& schema) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::DataError, "dataset not found: " + path.string());
    }
    // gzopen reads uncompressed files transparently.
    gzFile file = gzopen(path.string().c_str(), "rb");
    if (file == nullptr) {
        throw Error(ErrorCode::DataError, "cannot open " + path.string());
    }
    struct Closer {
        gzFile f;
        ~Closer() { gzclose(f); }
    } closer{file};

    std::vector<RawRecord> records;
    std::string line;
    char buf[4096];
    std::size_t line_no = 0;
    auto flush = [&] {
        ++line_no;
        if (!trim(line).empty()) {
            try {
                records.push_back(parse_kdd_record(line, schema));
            } catch (const Error& e) {
                throw Error(e.code(), path.filename().string() + ":" + std::to_string(line_no) +
                                          ": " + e.what());
            }
        }
        line.clear();
    };
    while (gzgets(file, buf, sizeof(buf)) != nullptr) {
        line += buf;
        if (!line.empty() && line.back() == '\n') flush();
    }
    int err = 0;
    const char* msg = gzerror(file, &err);
    if (err != Z_OK && err != Z_STREAM_END) {
        throw Error(ErrorCode::DataError, path.string() + ": " + msg);
    }
    if (!line.empty()) flush();
    return records;
}

// ---------------------------------------------------------------------------
// Encoding

FeatureSchema fit_vocabularies(std::span<const RawRecord> records, FeatureSchema schema) {
    for (std::size_t j = 0; j < schema.columns.size(); ++j) {
        auto& col = schema.columns[j];
        if (col.kind != ColumnKind::Categorical) continue;
        std::set<std::string> seen;
        for (const auto& rec : records) {
            if (j < rec.features.size()) seen.insert(rec.features[j]);
        }
        col.vocabulary.assign(seen.begin(), seen.end());
    }
    return schema;
}

NumericDataset encode_features(std::span<const RawRecord> records, const FeatureSchema& schema,
                               const Taxonomy* taxonomy) {
    std::vector<EncodedColumn> encoded;
    std::vector<std::map<std::string, std::size_t, std::less<>>> lookup(schema.columns.size());
    for (std::size_t j = 0; j < schema.columns.size(); ++j) {
        const auto& col = schema.columns[j];
        if (col.kind == ColumnKind::Numeric) {
            encoded.push_back({col.name, col.name, std::nullopt});
            continue;
        }
        for (std::size_t t = 0; t < col.vocabulary.size(); ++t) {
            const auto& token = col.vocabulary[t];
            if (!lookup[j].emplace(token, t).second) {
                throw Error(ErrorCode::DataError,
                            "duplicate token '" + token + "' in vocabulary of " + col.name);
            }
            encoded.push_back({col.name + "=" + token, col.name, token});
        }
    }

    const auto width = encoded.size();
    NumericDataset out(width, std::move(encoded));
    std::vector<double> row(out.cols());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.features.size() != schema.columns.size()) {
            throw Error(ErrorCode::FieldCountMismatch,
                        "record " + std::to_string(i) + " has " +
                            std::to_string(rec.features.size()) + " features");
        }
        std::fill(row.begin(), row.end(), 0.0);
        std::size_t k = 0;
        for (std::size_t j = 0; j < schema.columns.size(); ++j) {
            const auto& col = schema.columns[j];
            if (col.kind == ColumnKind::Numeric) {
                auto v = parse_number(rec.features[j]);
                if (!v) {
                    throw Error(ErrorCode::NumericParseError,
                                "record " + std::to_string(i) + " column " + std::to_string(j));
                }
                row[k++] = *v;
                continue;
            }
            auto it = lookup[j].find(rec.features[j]);
            if (it == lookup[j].end()) {
                throw Error(ErrorCode::UnknownCategory,
                            "'" + rec.features[j] + "' in column " + col.name);
            }
            row[k + it->second] = 1.0;
            k += col.vocabulary.size();
        }
        if (taxonomy != nullptr) {
            out.append(i, row, taxonomy->map_label(rec.label));
        } else {
            out.append(i, row);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sampling

std::string_view to_string(SampleStrategy strategy) {
    return strategy == SampleStrategy::Uniform ? "uniform" : "stratified";
}

std::optional<SampleStrategy> parse_sample_strategy(std::string_view text) {
    if (text == "uniform") return SampleStrategy::Uniform;
    if (text == "stratified" || text == "stratified-by-category") return SampleStrategy::Stratified;
    return std::nullopt;
}

NumericDataset sample_dataset(const NumericDataset& dataset, SampleStrategy strategy,
                              std::size_t count, std::uint64_t seed) {
    const auto n = dataset.rows();
    if (count == 0) {
        throw Error(ErrorCode::CountExceedsPopulation, "sample count must be positive");
    }
    if (count > n) {
        throw Error(ErrorCode::CountExceedsPopulation,
                    "requested " + std::to_string(count) + " of " + std::to_string(n) + " rows");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(count);

    if (strategy == SampleStrategy::Uniform) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
    } else {
        if (!dataset.has_labels()) {
            throw Error(ErrorCode::MissingLabels, "stratified sampling requires labels");
        }
        constexpr std::size_t kCats = 5;
        std::vector<std::vector<std::size_t>> members(kCats);
        for (std::size_t i = 0; i < n; ++i) {
            members[static_cast<std::size_t>(dataset.labels()[i].category)].push_back(i);
        }
        // Largest-remainder apportionment: floor(count * n_k / n) plus one for
        // the largest fractional parts.
        std::vector<std::size_t> quota(kCats);
        std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder numerator, k)
        std::size_t assigned = 0;
        for (std::size_t k = 0; k < kCats; ++k) {
            const auto scaled = count * members[k].size();
            quota[k] = scaled / n;
            assigned += quota[k];
            remainders.emplace_back(scaled % n, k);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t r = 0; assigned < count; ++r) {
            auto k = remainders[r].second;
            if (quota[k] < members[k].size()) {
                ++quota[k];
                ++assigned;
            }
        }
        for (std::size_t k = 0; k < kCats; ++k) {
            auto pool = members[k];
            std::shuffle(pool.begin(), pool.end(), rng);
            chosen.insert(chosen.end(), pool.begin(),
                          pool.begin() + static_cast<std::ptrdiff_t>(quota[k]));
        }
    }
    std::sort(chosen.begin(), chosen.end());
    auto out = dataset.subset(chosen);
    out.provenance["sample"] = {{"strategy", to_string(strategy)},
                                {"count", count},
                                {"seed", seed},
                                {"population", n}};
    return out;
}

// ---------------------------------------------------------------------------
// Hashing

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t state) {
    for (auto b : bytes) {
        state ^= b;
        state *= 0x100000001b3ULL;
    }
    return state;
}

namespace {
template <typename T>
std::uint64_t fnv1a_value(const T& value, std::uint64_t state) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    return fnv1a(bytes, state);
}
}  // namespace

std::uint64_t fingerprint(const NumericDataset& dataset) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a_value(static_cast<std::uint64_t>(dataset.rows()), h);
    h = fnv1a_value(static_cast<std::uint64_t>(dataset.cols()), h);
    for (auto id : dataset.row_ids()) h = fnv1a_value(id, h);
    for (double v : dataset.values()) h = fnv1a_value(v, h);
    return h;
}

std::uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::DataError, "cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        auto got = static_cast<std::size_t>(in.gcount());
        h = fnv1a({reinterpret_cast<const unsigned char*>(buf), got}, h);
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p += ".json";
    return p;
}

void write_dataset(const NumericDataset& dataset, const std::filesystem::path& path) {
    std::string csv = "row_id";
    if (dataset.has_labels()) csv += ",label,category";
    for (const auto& col : dataset.schema()) {
        csv += ',';
        csv += col.name;
    }
    csv += '\n';
    for (std::size_t i = 0; i < dataset.rows(); ++i) {
        csv += std::to_string(dataset.row_ids()[i]);
        if (dataset.has_labels()) {
            const auto& lbl = dataset.labels()[i];
            csv += ',';
            csv += lbl.raw_name;
            csv += ',';
            csv += to_string(lbl.category);
        }
        for (double v : dataset.row(i)) {
            csv += ',';
            csv += format_double(v);
        }
        csv += '\n';
    }

    nlohmann::json columns = nlohmann::json::array();
    for (const auto& col : dataset.schema()) {
        nlohmann::json c = {{"name", col.name}, {"source", col.source}};
        c["kind"] = col.token ? "indicator" : "numeric";
        if (col.token) c["token"] = *col.token;
        columns.push_back(std::move(c));
    }
    nlohmann::json meta = {
        {"format", "nids-numeric-dataset"},
        {"version", 1},
        {"rows", dataset.rows()},
        {"cols", dataset.cols()},
        {"has_labels", dataset.has_labels()},
        {"columns", std::move(columns)},
        {"fingerprint", hex64(fingerprint(dataset))},
        {"provenance", dataset.provenance},
    };
    write_file_atomic(path, csv);
    write_file_atomic(sidecar_path(path), meta.dump(2) + "\n");
}

NumericDataset read_dataset(const std::filesystem::path& path) {
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(sidecar_path(path)));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::DataError, sidecar_path(path).string() + ": " + e.what());
    }
    if (meta.value("format", "") != "nids-numeric-dataset") {
        throw Error(ErrorCode::DataError, sidecar_path(path).string() + ": not a dataset sidecar");
    }
    std::vector<EncodedColumn> schema;
    for (const auto& c : meta.at("columns")) {
        EncodedColumn col{c.at("name"), c.at("source"), std::nullopt};
        if (c.contains("token")) col.token = c.at("token").get<std::string>();
        schema.push_back(std::move(col));
    }
    const bool labelled = meta.at("has_labels").get<bool>();
    const std::size_t rows = meta.at("rows");
    const auto width = schema.size();
    NumericDataset ds(width, std::move(schema));
    ds.provenance = meta.value("provenance", nlohmann::json::object());

    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> values(ds.cols());
    std::size_t line_no = 1;
    const std::size_t lead = labelled ? 3 : 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_commas(line);
        auto where = [&] { return path.filename().string() + ":" + std::to_string(line_no); };
        if (fields.size() != lead + ds.cols()) {
            throw Error(ErrorCode::FieldCountMismatch, where());
        }
        RowId id = 0;
        auto idf = trim(fields[0]);
        if (std::from_chars(idf.data(), idf.data() + idf.size(), id).ec != std::errc()) {
            throw Error(ErrorCode::NumericParseError, where() + ": row_id");
        }
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            auto v = parse_number(fields[lead + j]);
            if (!v) {
                throw Error(ErrorCode::NumericParseError,
                            where() + ": column " + std::to_string(j));
            }
            values[j] = *v;
        }
        if (labelled) {
            auto cat = parse_category(fields[2]);
            if (!cat) throw Error(ErrorCode::UnknownLabel, where() + ": category");
            ds.append(id, values, ClassLabel{*cat, std::string(trim(fields[1]))});
        } else {
            ds.append(id, values);
        }
    }
    if (ds.rows() != rows) {
        throw Error(ErrorCode::DataError, path.string() + ": sidecar says " +
                                              std::to_string(rows) + " rows, found " +
                                              std::to_string(ds.rows()));
    }
    return ds;
}

}  // namespace nids
