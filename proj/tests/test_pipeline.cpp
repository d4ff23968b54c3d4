#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nids/error.hpp"
#include "nids/io.hpp"
#include "nids/pipeline.hpp"

using namespace nids;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = NIDS_DATA_DIR;

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("nids_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json kdd_config(const fs::path& out) {
    return {{"dataset", (kData / "kdd_sample_1000.csv").string()},
            {"taxonomy", (kData / "kdd99_taxonomy.txt").string()},
            {"output_dir", out.string()},
            {"clusters", 8},
            {"labeling", {{"mode", "unsupervised"}, {"alpha", 0.05}}}};
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected nids::Error");
    return ErrorCode::InvariantViolation;
}

}  // namespace

TEST_CASE("config parsing and validation") {
    auto cfg = ExperimentConfig::from_json(kdd_config("/tmp/x"));
    CHECK(cfg.clusters == 8);
    CHECK(cfg.method == Method::NewMedoid);
    CHECK(cfg.max_iterations == 100);
    CHECK(cfg.distance_cache_cap == 8192);
    CHECK_NOTHROW(cfg.validate());

    auto doc = kdd_config("/tmp/x");
    doc["clusters"] = 0;
    try {
        ExperimentConfig::from_json(doc).validate();
        FAIL("expected ConfigInvalid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigInvalid);
        CHECK(std::string(e.what()).find("cluster count") != std::string::npos);
    }

    doc = kdd_config("/tmp/x");
    doc["labeling"]["alpha"] = 1.5;
    CHECK(code_of([&] { ExperimentConfig::from_json(doc).validate(); }) == ErrorCode::ConfigInvalid);

    doc = kdd_config("/tmp/x");
    doc["clusterz"] = 3;
    CHECK(code_of([&] { ExperimentConfig::from_json(doc); }) == ErrorCode::ConfigInvalid);

    doc = kdd_config("/tmp/x");
    doc["clusters"] = "three";
    CHECK(code_of([&] { ExperimentConfig::from_json(doc); }) == ErrorCode::ConfigInvalid);

    doc = kdd_config("/tmp/x");
    doc["method"] = "dbscan";
    CHECK(code_of([&] { ExperimentConfig::from_json(doc); }) == ErrorCode::ConfigInvalid);

    auto rel = ExperimentConfig::from_json({{"dataset", "d.csv"}, {"clusters", 2}}, "/base/dir");
    CHECK(rel.dataset == fs::path("/base/dir/d.csv"));
}

TEST_CASE("missing dataset is a data error") {
    auto out = fresh_dir("missing");
    auto doc = kdd_config(out);
    doc["dataset"] = (out / "nope.csv").string();
    auto cfg = ExperimentConfig::from_json(doc);
    auto code = code_of([&] { run_pipeline(cfg); });
    CHECK(code == ErrorCode::DataError);
    CHECK(classify(code) == ErrorClass::Data);
}

TEST_CASE("run_pipeline on the bundled sample writes five files") {
    auto out = fresh_dir("run");
    auto cfg = ExperimentConfig::from_json(kdd_config(out));
    auto res = run_pipeline(cfg);
    for (const char* f : {"clustering.json", "verdicts.csv", "metrics.json", "metrics.csv",
                          "manifest.json"}) {
        CHECK(fs::exists(out / f));
    }
    CHECK(std::distance(fs::directory_iterator(out), fs::directory_iterator{}) == 5);

    auto clustering = json::parse(read_file(out / "clustering.json"));
    CHECK(clustering["method"] == "new-medoid");
    CHECK(clustering["assignment"].size() == 1000);
    CHECK(clustering.contains("standardizer"));
    std::size_t total = 0;
    for (auto s : clustering["cluster_sizes"]) total += s.get<std::size_t>();
    CHECK(total == 1000);

    auto metrics = json::parse(read_file(out / "metrics.json"));
    for (const char* key : {"detection_rate", "accuracy", "false_alarm_rate"}) {
        auto v = metrics["metrics"][key];
        if (!v.is_null()) {
            CHECK(v.get<double>() >= 0.0);
            CHECK(v.get<double>() <= 1.0);
        }
    }
    CHECK(res.run.metrics.has_value());
}

TEST_CASE("re-running from the manifest reproduces outputs byte for byte") {
    auto a = fresh_dir("det_a");
    auto b = fresh_dir("det_b");
    auto cfg = ExperimentConfig::from_json(kdd_config(a));
    cfg.sample_strategy = SampleStrategy::Stratified;
    cfg.sample_count = 600;
    cfg.seed = 17;
    run_pipeline(cfg);

    auto from_manifest = ExperimentConfig::load(a / "manifest.json");
    CHECK(from_manifest.seed == 17);
    CHECK(from_manifest.sample_count == 600);
    from_manifest.output_dir = b;
    run_pipeline(from_manifest);
    for (const char* f : {"clustering.json", "verdicts.csv", "metrics.json", "metrics.csv"}) {
        CHECK(read_file(a / f) == read_file(b / f));
    }
}

TEST_CASE("stages can be rerun individually") {
    auto out = fresh_dir("stages");
    auto cfg = ExperimentConfig::from_json(kdd_config(out));
    auto data = ingest_stage(cfg);
    CHECK(fs::exists(out / "dataset.csv"));
    CHECK(fs::exists(out / "dataset.csv.json"));
    CHECK(data.rows() == 1000);

    auto clustered = cluster_stage(cfg);
    CHECK(fs::exists(out / "clustering.json"));
    auto evaluated = evaluate_stage(cfg);
    CHECK(evaluated.assignment == clustered.assignment);
    CHECK(evaluated.predictions == clustered.predictions);

    // Same numbers as a one-shot run.
    auto whole = fresh_dir("stages_whole");
    auto cfg2 = ExperimentConfig::from_json(kdd_config(whole));
    run_pipeline(cfg2);
    CHECK(read_file(out / "verdicts.csv") == read_file(whole / "verdicts.csv"));
    CHECK(read_file(out / "metrics.json") == read_file(whole / "metrics.json"));
}

TEST_CASE("evaluate refuses a clustering of different data") {
    auto out = fresh_dir("mismatch");
    auto cfg = ExperimentConfig::from_json(kdd_config(out));
    cluster_stage(cfg);
    cfg.sample_strategy = SampleStrategy::Uniform;
    cfg.sample_count = 500;
    CHECK(code_of([&] { evaluate_stage(cfg); }) == ErrorCode::DataError);
}

TEST_CASE("compare_methods") {
    auto out = fresh_dir("compare");
    json doc = {{"dataset", (kData / "blobs.csv").string()},
                {"output_dir", out.string()},
                {"clusters", 3},
                {"labeling", {{"mode", "unsupervised"}, {"alpha", 0.06}}}};
    auto cfg = ExperimentConfig::from_json(doc);

    auto both = compare_methods(cfg, {Method::NewMedoid, Method::KMeans});
    REQUIRE(both.size() == 2);
    CHECK(both[0].method == "new-medoid");
    CHECK(both[1].method == "kmeans");
    const auto first = read_file(out / "comparison.csv");
    const auto table = read_file(out / "comparison.txt");
    CHECK(table.find("measured: new-medoid") != std::string::npos);
    CHECK(table.find("measured: kmeans") != std::string::npos);
    CHECK(table.find("published: New medoid") != std::string::npos);

    compare_methods(cfg, {Method::NewMedoid, Method::KMeans});
    CHECK(read_file(out / "comparison.csv") == first);

    auto one = compare_methods(cfg, {Method::KMeans});
    CHECK(one.size() == 1);
    auto j = json::parse(read_file(out / "comparison.json"));
    CHECK(j["runs"].size() == 1);
    CHECK(j["reference"]["rows"].size() == 4);

    CHECK(code_of([&] { compare_methods(cfg, {}); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("majority labeling needs labels and kmeans runs through the pipeline") {
    auto out = fresh_dir("majority");
    auto doc = kdd_config(out);
    doc["labeling"] = {{"mode", "majority"}};
    doc["method"] = "kmeans";
    auto res = run_pipeline(ExperimentConfig::from_json(doc));
    REQUIRE(res.run.metrics.has_value());
    CHECK(res.run.metrics->labeling == "majority");
    CHECK(res.run.metrics->method == "kmeans");
    auto clustering = json::parse(read_file(out / "clustering.json"));
    CHECK(clustering["method"] == "kmeans");
}
