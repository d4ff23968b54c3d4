#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nids/clustering.hpp"
#include "nids/dataset.hpp"
#include "nids/eval.hpp"
#include "nids/labeling.hpp"
#include "nids/preprocess.hpp"

namespace nids {

inline constexpr const char* kVersion = "1.0.0";

enum class Method { NewMedoid, KMeans };
enum class LabelingMode { Unsupervised, Majority };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);

/// One experiment, loaded from a JSON document. Relative paths resolve
/// against the directory holding the document.
struct ExperimentConfig {
    std::filesystem::path dataset;
    std::filesystem::path taxonomy;  // required for raw KDD input
    std::filesystem::path output_dir = "out";

    std::optional<SampleStrategy> sample_strategy;
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;

    std::size_t clusters = 0;
    std::size_t max_iterations = 100;
    double tolerance = 0.0;
    std::size_t distance_cache_cap = DistanceCache::kDefaultFullCap;

    LabelingMode labeling = LabelingMode::Unsupervised;
    double alpha = 0.05;

    Method method = Method::NewMedoid;
    KMeansInit kmeans_init = KMeansInit::Medoid;

    /// Accepts a config document or a run manifest (uses its "config").
    static ExperimentConfig from_json(const nlohmann::json& doc,
                                      const std::filesystem::path& base_dir = {});
    static ExperimentConfig load(const std::filesystem::path& path);

    /// Absolute paths, every field present.
    nlohmann::json to_json() const;

    /// Throws ConfigInvalid naming the offending field.
    void validate() const;

    ClusterConfig cluster_config() const;
    KMeansConfig kmeans_config() const;
};

/// Raw input to an encoded (and optionally sampled) dataset. `dataset` may be a
/// KDD99 file (plain or gzip) or a CSV written by write_dataset.
NumericDataset load_input(const ExperimentConfig& config);

/// Everything one method produces on a standardized dataset.
struct MethodRun {
    Method method = Method::NewMedoid;
    nlohmann::json clustering;  // serialized result
    std::vector<std::size_t> assignment;
    std::vector<std::size_t> sizes;
    ClusterVerdicts verdicts;
    std::vector<Verdict> predictions;
    std::optional<MetricsReport> metrics;  // requires labels
};

MethodRun run_method(const ExperimentConfig& config, Method method,
                     const NumericDataset& standardized);

struct PipelineOutputs {
    std::filesystem::path clustering;
    std::filesystem::path verdicts;
    std::filesystem::path metrics;
    std::filesystem::path plot_csv;
    std::filesystem::path manifest;
    MethodRun run;
};

/// Stage: load/encode/sample, write <out>/dataset.csv. Returns the dataset.
NumericDataset ingest_stage(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Stage: standardize and cluster, write <out>/clustering.json. Reuses
/// <out>/dataset.csv when present.
MethodRun cluster_stage(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Stage: read <out>/clustering.json, label and score, write verdicts and
/// metrics.
MethodRun evaluate_stage(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Full pipeline; writes clustering.json, verdicts.csv, metrics.json,
/// metrics.csv and manifest.json into the output directory.
PipelineOutputs run_pipeline(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Runs each method on the same standardized data and writes
/// comparison.json, comparison.csv and comparison.txt.
std::vector<MetricsReport> compare_methods(const ExperimentConfig& config,
                                           const std::vector<Method>& methods,
                                           std::ostream* log = nullptr);

}  // namespace nids
