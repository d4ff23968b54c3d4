// nids: medoid-clustering intrusion detection experiments on KDD-Cup-99 data.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nids/error.hpp"
#include "nids/pipeline.hpp"

namespace {

int exit_code(nids::ErrorClass cls) {
    switch (cls) {
        case nids::ErrorClass::Config: return 2;
        case nids::ErrorClass::Data: return 3;
        case nids::ErrorClass::Internal: return 4;
    }
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anomaly-based intrusion detection with medoid clustering"};
    app.set_version_flag("--version", std::string(nids::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::vector<std::string> methods;
    bool quiet = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Experiment config (JSON) or run manifest")
            ->required();
        sub->add_option("--seed", seed, "Override the sampling / k-means seed");
        sub->add_option("--out", out_dir, "Override the output directory");
        sub->add_flag("--quiet", quiet, "Suppress progress output");
    };

    auto* ingest = app.add_subcommand("ingest", "Parse, encode and sample the dataset");
    auto* clus = app.add_subcommand("cluster", "Standardize and cluster");
    auto* evaluate = app.add_subcommand("evaluate", "Label clusters and score them");
    auto* run = app.add_subcommand("run", "Full pipeline with run manifest");
    auto* compare = app.add_subcommand("compare", "Side-by-side method comparison");
    for (auto* sub : {ingest, clus, evaluate, run, compare}) add_common(sub);
    for (auto* sub : {clus, run}) {
        sub->add_option("--method", methods, "new-medoid | kmeans")->expected(1);
    }
    compare->add_option("--method", methods, "Methods to compare (repeatable)")->expected(1, 2);

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = nids::ExperimentConfig::load(config_path);
        if (seed) config.seed = *seed;
        if (!out_dir.empty()) config.output_dir = out_dir;
        std::vector<nids::Method> parsed;
        for (const auto& m : methods) {
            auto method = nids::parse_method(m);
            if (!method) {
                throw nids::Error(nids::ErrorCode::ConfigInvalid, "method: unknown '" + m + "'");
            }
            parsed.push_back(*method);
        }
        std::ostream* log = quiet ? nullptr : &std::cerr;

        if (*ingest) {
            nids::ingest_stage(config, log);
        } else if (*clus) {
            if (!parsed.empty()) config.method = parsed.front();
            nids::cluster_stage(config, log);
        } else if (*evaluate) {
            nids::evaluate_stage(config, log);
        } else if (*run) {
            if (!parsed.empty()) config.method = parsed.front();
            nids::run_pipeline(config, log);
        } else if (*compare) {
            if (parsed.empty()) parsed = {nids::Method::NewMedoid, nids::Method::KMeans};
            auto reports = nids::compare_methods(config, parsed, nullptr);
            if (!quiet) std::cout << nids::comparison_table(reports);
        }
    } catch (const nids::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(nids::classify(e.code()));
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
