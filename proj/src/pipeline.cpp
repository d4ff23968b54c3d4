#include "nids/pipeline.hpp"

#include <chrono>
#include <ostream>
#include <set>
#include <unordered_map>

#include "nids/error.hpp"
#include "nids/io.hpp"

namespace nids {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Method method) {
    return method == Method::NewMedoid ? "new-medoid" : "kmeans";
}

std::optional<Method> parse_method(std::string_view text) {
    if (text == "new-medoid" || text == "medoid") return Method::NewMedoid;
    if (text == "kmeans" || text == "k-means") return Method::KMeans;
    return std::nullopt;
}

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ConfigInvalid, field + ": " + what);
}

template <typename T>
T field(const json& doc, const char* key, const T& fallback) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        config_error(key, "wrong type (" + std::string(it->type_name()) + ")");
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    fs::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path.lexically_normal();
}

void say(std::ostream* log, const std::string& msg) {
    if (log != nullptr) *log << msg << '\n';
}

void write_json(const fs::path& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::DataError, path.string() + ": " + e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentConfig

ExperimentConfig ExperimentConfig::from_json(const json& input, const fs::path& base_dir) {
    if (!input.is_object()) config_error("config", "expected a JSON object");
    const json& doc = input.contains("manifest_version") ? input.at("config") : input;
    if (!doc.is_object()) config_error("config", "expected a JSON object");

    static const std::set<std::string> known = {
        "dataset", "taxonomy", "output_dir", "sample", "clusters", "max_iterations", "tolerance",
        "distance_cache_cap", "labeling", "method", "kmeans_init", "seed"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.count(key)) config_error(key, "unknown field");
    }

    ExperimentConfig cfg;
    cfg.dataset = resolve(base_dir, field<std::string>(doc, "dataset", ""));
    cfg.taxonomy = resolve(base_dir, field<std::string>(doc, "taxonomy", ""));
    cfg.output_dir = resolve(base_dir, field<std::string>(doc, "output_dir", "out"));
    cfg.seed = field<std::uint64_t>(doc, "seed", 0);

    if (auto it = doc.find("sample"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) config_error("sample", "expected an object");
        auto strategy = field<std::string>(*it, "strategy", "uniform");
        if (strategy != "none") {
            cfg.sample_strategy = parse_sample_strategy(strategy);
            if (!cfg.sample_strategy) config_error("sample.strategy", "unknown '" + strategy + "'");
            cfg.sample_count = field<std::size_t>(*it, "count", 0);
        }
        cfg.seed = field<std::uint64_t>(*it, "seed", cfg.seed);
    }

    if (doc.contains("clusters") && doc.at("clusters").is_number_integer() &&
        doc.at("clusters").get<long long>() < 0) {
        config_error("clusters", "cluster count must be >= 1");
    }
    cfg.clusters = field<std::size_t>(doc, "clusters", 0);
    cfg.max_iterations = field<std::size_t>(doc, "max_iterations", cfg.max_iterations);
    cfg.tolerance = field<double>(doc, "tolerance", cfg.tolerance);
    cfg.distance_cache_cap = field<std::size_t>(doc, "distance_cache_cap", cfg.distance_cache_cap);

    if (auto it = doc.find("labeling"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) config_error("labeling", "expected an object");
        auto mode = field<std::string>(*it, "mode", "unsupervised");
        if (mode == "unsupervised") {
            cfg.labeling = LabelingMode::Unsupervised;
        } else if (mode == "majority") {
            cfg.labeling = LabelingMode::Majority;
        } else {
            config_error("labeling.mode", "unknown '" + mode + "'");
        }
        cfg.alpha = field<double>(*it, "alpha", cfg.alpha);
    }

    auto method = field<std::string>(doc, "method", "new-medoid");
    auto parsed = parse_method(method);
    if (!parsed) config_error("method", "unknown '" + method + "'");
    cfg.method = *parsed;

    auto init = field<std::string>(doc, "kmeans_init", "medoid");
    if (init == "medoid") {
        cfg.kmeans_init = KMeansInit::Medoid;
    } else if (init == "random") {
        cfg.kmeans_init = KMeansInit::Random;
    } else {
        config_error("kmeans_init", "unknown '" + init + "'");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
    if (!fs::exists(path)) config_error("config", "file not found: " + path.string());
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        config_error("config", std::string("invalid JSON: ") + e.what());
    }
    return from_json(doc, fs::absolute(path).parent_path());
}

json ExperimentConfig::to_json() const {
    json sample = nullptr;
    if (sample_strategy) {
        sample = {{"strategy", to_string(*sample_strategy)}, {"count", sample_count}, {"seed", seed}};
    }
    auto abs = [](const fs::path& p) { return p.empty() ? std::string() : fs::absolute(p).lexically_normal().string(); };
    return {{"dataset", abs(dataset)},
            {"taxonomy", abs(taxonomy)},
            {"output_dir", abs(output_dir)},
            {"sample", sample},
            {"seed", seed},
            {"clusters", clusters},
            {"max_iterations", max_iterations},
            {"tolerance", tolerance},
            {"distance_cache_cap", distance_cache_cap},
            {"labeling",
             {{"mode", labeling == LabelingMode::Unsupervised ? "unsupervised" : "majority"},
              {"alpha", alpha}}},
            {"method", to_string(method)},
            {"kmeans_init", kmeans_init == KMeansInit::Medoid ? "medoid" : "random"}};
}

void ExperimentConfig::validate() const {
    if (dataset.empty()) config_error("dataset", "path is required");
    if (clusters < 1) config_error("clusters", "cluster count must be >= 1");
    if (max_iterations < 1) config_error("max_iterations", "must be >= 1");
    if (!(tolerance >= 0.0)) config_error("tolerance", "must be >= 0");
    if (labeling == LabelingMode::Unsupervised && !(alpha > 0.0 && alpha < 1.0)) {
        config_error("labeling.alpha", "alpha must lie in (0, 1)");
    }
    if (sample_strategy && sample_count < 1) config_error("sample.count", "must be >= 1");
    if (output_dir.empty()) config_error("output_dir", "path is required");
}

ClusterConfig ExperimentConfig::cluster_config() const {
    ClusterConfig c;
    c.max_iterations = max_iterations;
    c.tolerance = tolerance;
    c.distance_cache_cap = distance_cache_cap;
    c.require_standardized = true;
    return c;
}

KMeansConfig ExperimentConfig::kmeans_config() const {
    KMeansConfig c;
    c.max_iterations = max_iterations;
    c.init = kmeans_init;
    c.seed = seed;
    c.distance_cache_cap = distance_cache_cap;
    return c;
}

// ---------------------------------------------------------------------------
// Stages

NumericDataset load_input(const ExperimentConfig& config) {
    if (!fs::exists(config.dataset)) {
        throw Error(ErrorCode::DataError, "dataset not found: " + config.dataset.string());
    }
    NumericDataset data;
    if (fs::exists(sidecar_path(config.dataset))) {
        data = read_dataset(config.dataset);
    } else {
        if (config.taxonomy.empty()) {
            throw Error(ErrorCode::ConfigInvalid, "taxonomy: required for KDD99 input");
        }
        const auto taxonomy = Taxonomy::load(config.taxonomy);
        const auto records = read_kdd_file(config.dataset, FeatureSchema::kdd99());
        const auto schema = fit_vocabularies(records, FeatureSchema::kdd99());
        data = encode_features(records, schema, &taxonomy);
        data.provenance["source"] = config.dataset.filename().string();
        data.provenance["source_hash"] = hex64(hash_file(config.dataset));
    }
    if (data.rows() == 0) throw Error(ErrorCode::EmptyDataset, config.dataset.string());
    if (config.sample_strategy) {
        data = sample_dataset(data, *config.sample_strategy, config.sample_count, config.seed);
    }
    return data;
}

namespace {

struct Prepared {
    NumericDataset raw;
    StandardizationParams params;
    NumericDataset standardized;
};

Prepared prepare(const NumericDataset& raw) {
    Prepared p{raw, fit_standardizer(raw), {}};
    p.standardized = apply_standardizer(p.params, raw);
    return p;
}

NumericDataset dataset_for_stage(const ExperimentConfig& config, std::ostream* log) {
    const auto cached = config.output_dir / "dataset.csv";
    if (fs::exists(cached) && fs::exists(sidecar_path(cached))) {
        say(log, "using " + cached.string());
        return read_dataset(cached);
    }
    return load_input(config);
}

void score(const ExperimentConfig& config, const NumericDataset& data, MethodRun& run) {
    PartitionView part{run.assignment, run.sizes};
    if (config.labeling == LabelingMode::Unsupervised) {
        run.verdicts = label_clusters_unsupervised(part, config.alpha);
    } else {
        if (!data.has_labels()) {
            throw Error(ErrorCode::MissingLabels, "majority labeling needs a labelled dataset");
        }
        run.verdicts = label_clusters_majority(part, data.labels());
    }
    run.predictions = classify_instances(run.verdicts, part);
    if (data.has_labels()) {
        run.metrics = build_report(std::string(to_string(run.method)), run.verdicts.mode,
                                   run.predictions, data.labels());
        run.metrics->config = {{"clusters", config.clusters},
                               {"alpha", config.alpha},
                               {"labeling", run.verdicts.mode},
                               {"rows", data.rows()}};
    }
}

void write_scores(const ExperimentConfig& config, const NumericDataset& data, const MethodRun& run,
                  PipelineOutputs& out) {
    out.verdicts = config.output_dir / "verdicts.csv";
    out.metrics = config.output_dir / "metrics.json";
    out.plot_csv = config.output_dir / "metrics.csv";
    write_file_atomic(out.verdicts, verdicts_csv(data.row_ids(), {run.assignment, run.sizes},
                                                 run.predictions));
    json metrics = {{"verdicts", to_json(run.verdicts)}};
    if (run.metrics) {
        metrics["metrics"] = to_json(*run.metrics);
        write_file_atomic(out.plot_csv, metrics_csv(std::span(&*run.metrics, 1)));
    } else {
        metrics["metrics"] = nullptr;
        metrics["reference"] = reference_json();
        write_file_atomic(out.plot_csv, metrics_csv({}));
    }
    write_json(out.metrics, metrics);
}

}  // namespace

MethodRun run_method(const ExperimentConfig& config, Method method,
                     const NumericDataset& standardized) {
    MethodRun run;
    run.method = method;
    if (method == Method::NewMedoid) {
        const auto cc = config.cluster_config();
        auto result = cluster(standardized, config.clusters, cc);
        run.clustering = to_json(result, standardized, cc);
        run.assignment = std::move(result.assignment);
        run.sizes = std::move(result.cluster_sizes);
    } else {
        const auto kc = config.kmeans_config();
        auto result = kmeans_cluster(standardized, config.clusters, kc);
        run.clustering = to_json(result, standardized, kc);
        run.assignment = std::move(result.assignment);
        run.sizes = std::move(result.cluster_sizes);
    }
    // Partition sanity; a failure here is a bug, not bad input.
    std::size_t total = 0;
    for (auto s : run.sizes) {
        if (s == 0) throw Error(ErrorCode::InvariantViolation, "empty cluster in result");
        total += s;
    }
    if (total != standardized.rows()) {
        throw Error(ErrorCode::InvariantViolation, "cluster sizes do not sum to row count");
    }
    score(config, standardized, run);
    return run;
}

NumericDataset ingest_stage(const ExperimentConfig& config, std::ostream* log) {
    config.validate();
    auto data = load_input(config);
    fs::create_directories(config.output_dir);
    const auto path = config.output_dir / "dataset.csv";
    write_dataset(data, path);
    say(log, "wrote " + path.string() + " (" + std::to_string(data.rows()) + " rows, " +
                 std::to_string(data.cols()) + " columns)");
    return data;
}

MethodRun cluster_stage(const ExperimentConfig& config, std::ostream* log) {
    config.validate();
    auto prepared = prepare(dataset_for_stage(config, log));
    auto run = run_method(config, config.method, prepared.standardized);
    run.clustering["standardizer"] = prepared.params.to_json();
    fs::create_directories(config.output_dir);
    write_json(config.output_dir / "clustering.json", run.clustering);
    say(log, "wrote " + (config.output_dir / "clustering.json").string());
    return run;
}

MethodRun evaluate_stage(const ExperimentConfig& config, std::ostream* log) {
    config.validate();
    const auto path = config.output_dir / "clustering.json";
    if (!fs::exists(path)) {
        throw Error(ErrorCode::DataError, path.string() + " not found; run the cluster stage first");
    }
    const auto doc = read_json(path);
    auto prepared = prepare(dataset_for_stage(config, log));
    const auto& data = prepared.standardized;
    if (doc.at("dataset").at("fingerprint") != hex64(fingerprint(data))) {
        throw Error(ErrorCode::DataError, path.string() + " was produced from a different dataset");
    }

    MethodRun run;
    auto method = parse_method(doc.at("method").get<std::string>());
    if (!method) throw Error(ErrorCode::DataError, path.string() + ": unknown method");
    run.method = *method;
    run.clustering = doc;
    run.sizes = doc.at("cluster_sizes").get<std::vector<std::size_t>>();
    std::unordered_map<RowId, std::size_t> cluster_of;
    for (const auto& pair : doc.at("assignment")) {
        cluster_of[pair.at(0).get<RowId>()] = pair.at(1).get<std::size_t>();
    }
    run.assignment.reserve(data.rows());
    for (auto id : data.row_ids()) {
        auto it = cluster_of.find(id);
        if (it == cluster_of.end() || it->second >= run.sizes.size()) {
            throw Error(ErrorCode::DataError, path.string() + ": no valid cluster for row " +
                                                  std::to_string(id));
        }
        run.assignment.push_back(it->second);
    }
    score(config, data, run);

    PipelineOutputs out;
    write_scores(config, data, run, out);
    say(log, "wrote " + out.verdicts.string() + ", " + out.metrics.string() + ", " +
                 out.plot_csv.string());
    return run;
}

PipelineOutputs run_pipeline(const ExperimentConfig& config, std::ostream* log) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    auto prepared = prepare(load_input(config));
    say(log, "dataset: " + std::to_string(prepared.raw.rows()) + " rows x " +
                 std::to_string(prepared.raw.cols()) + " columns");

    PipelineOutputs out;
    out.run = run_method(config, config.method, prepared.standardized);
    out.run.clustering["standardizer"] = prepared.params.to_json();

    fs::create_directories(config.output_dir);
    out.clustering = config.output_dir / "clustering.json";
    write_json(out.clustering, out.run.clustering);
    write_scores(config, prepared.standardized, out.run, out);

    const auto elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json inputs = {{"dataset", {{"path", fs::absolute(config.dataset).string()},
                                {"hash", hex64(hash_file(config.dataset))}}}};
    if (!config.taxonomy.empty() && fs::exists(config.taxonomy)) {
        inputs["taxonomy"] = {{"path", fs::absolute(config.taxonomy).string()},
                              {"hash", hex64(hash_file(config.taxonomy))}};
    }
    json outputs = json::object();
    for (const auto& p : {out.clustering, out.verdicts, out.metrics, out.plot_csv}) {
        outputs[p.filename().string()] = hex64(hash_file(p));
    }
    json manifest = {{"manifest_version", 1},
                     {"tool", "nids"},
                     {"version", kVersion},
#if defined(__VERSION__)
                     {"compiler", __VERSION__},
#endif
                     {"config", config.to_json()},
                     {"inputs", std::move(inputs)},
                     {"dataset_fingerprint", hex64(fingerprint(prepared.standardized))},
                     {"outputs", std::move(outputs)},
                     {"wall_time_seconds", elapsed}};
    out.manifest = config.output_dir / "manifest.json";
    write_json(out.manifest, manifest);
    if (out.run.metrics) {
        say(log, comparison_table(std::span(&*out.run.metrics, 1)));
    }
    say(log, "wrote 5 files to " + config.output_dir.string());
    return out;
}

std::vector<MetricsReport> compare_methods(const ExperimentConfig& config,
                                           const std::vector<Method>& methods,
                                           std::ostream* log) {
    config.validate();
    if (methods.empty()) throw Error(ErrorCode::ConfigInvalid, "method: select at least one");
    auto prepared = prepare(load_input(config));
    if (!prepared.standardized.has_labels()) {
        throw Error(ErrorCode::MissingLabels, "comparison needs a labelled dataset");
    }

    std::vector<MetricsReport> reports;
    json runs = json::array();
    for (auto m : methods) {
        auto run = run_method(config, m, prepared.standardized);
        reports.push_back(*run.metrics);
        runs.push_back({{"method", to_string(m)},
                        {"clusters", run.sizes.size()},
                        {"cluster_sizes", run.sizes},
                        {"metrics", to_json(*run.metrics, false)}});
    }
    fs::create_directories(config.output_dir);
    json doc = {{"config", config.to_json()},
                {"dataset_fingerprint", hex64(fingerprint(prepared.standardized))},
                {"runs", std::move(runs)},
                {"reference", reference_json()}};
    write_json(config.output_dir / "comparison.json", doc);
    write_file_atomic(config.output_dir / "comparison.csv", metrics_csv(reports));
    const auto table = comparison_table(reports);
    write_file_atomic(config.output_dir / "comparison.txt", table);
    say(log, table);
    return reports;
}

}  // namespace nids
