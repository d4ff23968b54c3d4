#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "nids/dataset.hpp"

namespace nids {

double euclidean(std::span<const double> a, std::span<const double> b);

/// Pairwise Euclidean distances over the rows of a dataset.
///
/// Full mode precomputes the n x n matrix; it is used when n <= full_cap.
/// On-demand mode computes entries as requested and keeps whole columns for
/// the rows passed to column(), which in practice are the current medoids.
/// The dataset must outlive the cache.
class DistanceCache {
public:
    enum class Mode { Full, OnDemand };

    static constexpr std::size_t kDefaultFullCap = 8192;

    explicit DistanceCache(const NumericDataset& data, std::size_t full_cap = kDefaultFullCap);

    Mode mode() const noexcept { return mode_; }
    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const;

    /// Distances from every row to row j.
    std::span<const double> column(std::size_t j) const;

    /// Sum over k of dist(i, k).
    const std::vector<double>& row_sums() const;

private:
    const NumericDataset* data_;
    std::size_t n_;
    Mode mode_;
    std::vector<double> matrix_;
    mutable std::unordered_map<std::size_t, std::vector<double>> columns_;
    mutable std::vector<double> row_sums_;
};

/// Scores each row j by v_j = sum_i dist(i, j) / sum_k dist(i, k) and returns
/// the c rows with the smallest scores, ascending by score then row index.
/// Rows whose distance sum is zero contribute nothing to any score.
std::vector<std::size_t> select_initial_medoids(const DistanceCache& cache, std::size_t c);

/// Per-row initialization score v_j used by select_initial_medoids.
std::vector<double> initial_medoid_scores(const DistanceCache& cache);

struct Assignment {
    std::vector<std::size_t> cluster;  // position in the medoid sequence
    double objective = 0.0;
};

/// Nearest medoid per row; ties go to the earliest medoid in `medoids`.
Assignment assign(const DistanceCache& cache, std::span<const std::size_t> medoids);

/// For each cluster index in [0, clusters), the member with the smallest total
/// distance to the other members (ties: smallest row index).
/// Throws EmptyClusterEncountered if a cluster has no members.
std::vector<std::size_t> update_medoids(const DistanceCache& cache,
                                        std::span<const std::size_t> assignment,
                                        std::size_t clusters);

struct ClusterConfig {
    std::size_t max_iterations = 100;
    double tolerance = 0.0;  // absolute; 0 means exact objective equality
    std::size_t distance_cache_cap = DistanceCache::kDefaultFullCap;
    bool require_standardized = false;

    nlohmann::json to_json() const;
};

/// Read-only view of a hard partition of rows into clusters.
struct PartitionView {
    std::span<const std::size_t> assignment;
    std::span<const std::size_t> sizes;
};

struct ClusteringResult {
    std::vector<std::size_t> medoids;     // row indices, one per surviving cluster
    std::vector<std::size_t> assignment;  // cluster index per row
    double objective = 0.0;
    std::vector<double> objective_trace;  // initial assignment first
    std::vector<std::size_t> cluster_sizes;
    std::size_t iterations = 0;
    std::size_t removed_empty = 0;
    bool converged = false;

    PartitionView partition() const { return {assignment, cluster_sizes}; }
};

/// Medoid clustering: distance-ratio initialization, then alternate medoid
/// update and reassignment until the objective stops changing. Clusters that
/// end up empty are deleted as soon as they appear.
ClusteringResult cluster(const NumericDataset& dataset, std::size_t c,
                         const ClusterConfig& config = {});

/// Sum of distances from every row to its assigned medoid, from scratch.
double medoid_objective(const NumericDataset& dataset, std::span<const std::size_t> medoids,
                        std::span<const std::size_t> assignment);

nlohmann::json to_json(const ClusteringResult& result, const NumericDataset& dataset,
                       const ClusterConfig& config);

// ---------------------------------------------------------------------------
// K-means baseline

std::vector<double> cluster_mean(const NumericDataset& dataset,
                                 std::span<const std::size_t> members);
std::vector<double> cluster_mean(const std::vector<std::vector<double>>& members);

enum class KMeansInit { Medoid, Random };

struct KMeansConfig {
    std::size_t max_iterations = 100;
    KMeansInit init = KMeansInit::Medoid;
    std::uint64_t seed = 0;  // Random init only
    std::size_t distance_cache_cap = DistanceCache::kDefaultFullCap;

    nlohmann::json to_json() const;
};

struct KMeansResult {
    std::size_t dims = 0;
    std::vector<double> centroids;  // row-major clusters x dims
    std::vector<std::size_t> assignment;
    std::vector<std::size_t> cluster_sizes;
    double sse = 0.0;
    std::size_t iterations = 0;
    std::size_t reseeded = 0;
    bool converged = false;

    std::size_t clusters() const noexcept { return cluster_sizes.size(); }
    std::span<const double> centroid(std::size_t k) const {
        return {centroids.data() + k * dims, dims};
    }
    PartitionView partition() const { return {assignment, cluster_sizes}; }
};

/// Lloyd iteration. Ties go to the lowest cluster index; a cluster that
/// empties is re-seeded at the row farthest from its own centroid. Clusters
/// still empty at the end are dropped.
KMeansResult kmeans_cluster(const NumericDataset& dataset, std::size_t c,
                            const KMeansConfig& config = {});

nlohmann::json to_json(const KMeansResult& result, const NumericDataset& dataset,
                       const KMeansConfig& config);

}  // namespace nids
