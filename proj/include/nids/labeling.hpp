#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nids/clustering.hpp"
#include "nids/dataset.hpp"

namespace nids {

enum class Verdict { Normal, Anomalous };

std::string_view to_string(Verdict verdict);

struct ClusterVerdict {
    Verdict verdict = Verdict::Normal;
    std::size_t size = 0;
    std::string rationale;
};

struct ClusterVerdicts {
    std::string mode;  // "unsupervised" or "majority"
    std::vector<ClusterVerdict> clusters;
};

/// Small-cluster rule: a cluster is anomalous iff its size < alpha * n.
/// Only cluster sizes are consulted.
ClusterVerdicts label_clusters_unsupervised(PartitionView partition, double alpha = 0.05);

/// Evaluation convenience: a cluster is anomalous iff at least half of its
/// members carry an attack label.
ClusterVerdicts label_clusters_majority(PartitionView partition,
                                        std::span<const ClassLabel> labels);

/// One verdict per row, inherited from the row's cluster.
std::vector<Verdict> classify_instances(const ClusterVerdicts& verdicts, PartitionView partition);

nlohmann::json to_json(const ClusterVerdicts& verdicts);

/// CSV with header row_id,cluster,verdict.
std::string verdicts_csv(std::span<const RowId> row_ids, PartitionView partition,
                         std::span<const Verdict> verdicts);

}  // namespace nids
