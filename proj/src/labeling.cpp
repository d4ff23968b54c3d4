#include "nids/labeling.hpp"

#include <cmath>
#include <sstream>

#include "nids/error.hpp"
#include "nids/io.hpp"

namespace nids {

std::string_view to_string(Verdict verdict) {
    return verdict == Verdict::Normal ? "normal" : "anomalous";
}

ClusterVerdicts label_clusters_unsupervised(PartitionView partition, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1), got " + format_double(alpha));
    }
    const auto n = partition.assignment.size();
    const double threshold = alpha * static_cast<double>(n);
    ClusterVerdicts out;
    out.mode = "unsupervised";
    for (auto size : partition.sizes) {
        ClusterVerdict v;
        v.size = size;
        v.verdict = static_cast<double>(size) < threshold ? Verdict::Anomalous : Verdict::Normal;
        v.rationale = "size " + std::to_string(size) +
                      (v.verdict == Verdict::Anomalous ? " < " : " >= ") + "alpha*n = " +
                      format_double(alpha) + "*" + std::to_string(n) + " = " +
                      format_double(threshold);
        out.clusters.push_back(std::move(v));
    }
    return out;
}

ClusterVerdicts label_clusters_majority(PartitionView partition,
                                        std::span<const ClassLabel> labels) {
    if (labels.size() != partition.assignment.size()) {
        throw Error(ErrorCode::MissingLabels, std::to_string(labels.size()) + " labels for " +
                                                  std::to_string(partition.assignment.size()) +
                                                  " rows");
    }
    std::vector<std::size_t> attacks(partition.sizes.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].is_attack()) ++attacks.at(partition.assignment[i]);
    }
    ClusterVerdicts out;
    out.mode = "majority";
    for (std::size_t k = 0; k < partition.sizes.size(); ++k) {
        ClusterVerdict v;
        v.size = partition.sizes[k];
        v.verdict = 2 * attacks[k] >= v.size ? Verdict::Anomalous : Verdict::Normal;
        v.rationale = std::to_string(attacks[k]) + " of " + std::to_string(v.size) +
                      " members are attacks";
        out.clusters.push_back(std::move(v));
    }
    return out;
}

std::vector<Verdict> classify_instances(const ClusterVerdicts& verdicts, PartitionView partition) {
    if (verdicts.clusters.size() != partition.sizes.size()) {
        throw Error(ErrorCode::ClusterMismatch,
                    std::to_string(verdicts.clusters.size()) + " verdicts for " +
                        std::to_string(partition.sizes.size()) + " clusters");
    }
    for (std::size_t k = 0; k < partition.sizes.size(); ++k) {
        if (verdicts.clusters[k].size != partition.sizes[k]) {
            throw Error(ErrorCode::ClusterMismatch, "size of cluster " + std::to_string(k));
        }
    }
    std::vector<Verdict> out;
    out.reserve(partition.assignment.size());
    for (auto k : partition.assignment) {
        if (k >= verdicts.clusters.size()) {
            throw Error(ErrorCode::ClusterMismatch, "row assigned to cluster " + std::to_string(k));
        }
        out.push_back(verdicts.clusters[k].verdict);
    }
    return out;
}

nlohmann::json to_json(const ClusterVerdicts& verdicts) {
    nlohmann::json clusters = nlohmann::json::array();
    std::size_t anomalous_rows = 0;
    std::size_t anomalous_clusters = 0;
    for (std::size_t k = 0; k < verdicts.clusters.size(); ++k) {
        const auto& v = verdicts.clusters[k];
        if (v.verdict == Verdict::Anomalous) {
            anomalous_rows += v.size;
            ++anomalous_clusters;
        }
        clusters.push_back({{"cluster", k},
                            {"size", v.size},
                            {"verdict", to_string(v.verdict)},
                            {"rationale", v.rationale}});
    }
    return {{"mode", verdicts.mode},
            {"anomalous_clusters", anomalous_clusters},
            {"anomalous_rows", anomalous_rows},
            {"clusters", std::move(clusters)}};
}

std::string verdicts_csv(std::span<const RowId> row_ids, PartitionView partition,
                         std::span<const Verdict> verdicts) {
    if (row_ids.size() != verdicts.size() || row_ids.size() != partition.assignment.size()) {
        throw Error(ErrorCode::RowMismatch, "row ids, assignment and verdicts differ in length");
    }
    std::ostringstream out;
    out << "row_id,cluster,verdict\n";
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        out << row_ids[i] << ',' << partition.assignment[i] << ',' << to_string(verdicts[i]) << '\n';
    }
    return out.str();
}

}  // namespace nids
