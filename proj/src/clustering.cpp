#include "nids/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "nids/error.hpp"

namespace nids {

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "vectors of length " + std::to_string(a.size()) +
                                                      " and " + std::to_string(b.size()));
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// DistanceCache

namespace {
// Upper bound on doubles held by the on-demand column cache.
constexpr std::size_t kColumnBudget = std::size_t{1} << 25;
}  // namespace

DistanceCache::DistanceCache(const NumericDataset& data, std::size_t full_cap)
    : data_(&data), n_(data.rows()), mode_(n_ <= full_cap ? Mode::Full : Mode::OnDemand) {
    if (mode_ != Mode::Full) return;
    matrix_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double d = euclidean(data.row(i), data.row(j));
            matrix_[i * n_ + j] = d;
            matrix_[j * n_ + i] = d;
        }
    }
}

double DistanceCache::operator()(std::size_t i, std::size_t j) const {
    if (mode_ == Mode::Full) return matrix_[i * n_ + j];
    if (i == j) return 0.0;
    if (auto it = columns_.find(j); it != columns_.end()) return it->second[i];
    if (auto it = columns_.find(i); it != columns_.end()) return it->second[j];
    // Evaluate in a fixed argument order so d(i, j) and d(j, i) agree bitwise.
    return i < j ? euclidean(data_->row(i), data_->row(j)) : euclidean(data_->row(j), data_->row(i));
}

std::span<const double> DistanceCache::column(std::size_t j) const {
    if (mode_ == Mode::Full) return {matrix_.data() + j * n_, n_};
    if (auto it = columns_.find(j); it != columns_.end()) return it->second;
    if ((columns_.size() + 1) * n_ > kColumnBudget) columns_.clear();
    std::vector<double> col(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        col[i] = i == j ? 0.0
                 : i < j ? euclidean(data_->row(i), data_->row(j))
                         : euclidean(data_->row(j), data_->row(i));
    }
    return columns_.emplace(j, std::move(col)).first->second;
}

const std::vector<double>& DistanceCache::row_sums() const {
    if (row_sums_.size() == n_) return row_sums_;
    row_sums_.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        long double acc = 0.0L;
        if (mode_ == Mode::Full) {
            for (std::size_t k = 0; k < n_; ++k) acc += matrix_[i * n_ + k];
        } else {
            for (std::size_t k = 0; k < n_; ++k) acc += (*this)(i, k);
        }
        row_sums_[i] = static_cast<double>(acc);
    }
    return row_sums_;
}

// ---------------------------------------------------------------------------
// Medoid steps

std::vector<double> initial_medoid_scores(const DistanceCache& cache) {
    const auto n = cache.size();
    const auto& sums = cache.row_sums();
    std::vector<double> scores(n);
    for (std::size_t j = 0; j < n; ++j) {
        long double v = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            if (sums[i] > 0.0) v += static_cast<long double>(cache(i, j)) / sums[i];
        }
        scores[j] = static_cast<double>(v);
    }
    return scores;
}

std::vector<std::size_t> select_initial_medoids(const DistanceCache& cache, std::size_t c) {
    const auto n = cache.size();
    if (c < 1 || c > n) {
        throw Error(ErrorCode::InvalidClusterCount,
                    "cluster count " + std::to_string(c) + " outside [1, " + std::to_string(n) + "]");
    }
    const auto scores = initial_medoid_scores(cache);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    order.resize(c);
    return order;
}

Assignment assign(const DistanceCache& cache, std::span<const std::size_t> medoids) {
    const auto n = cache.size();
    Assignment out;
    out.cluster.assign(n, 0);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    for (std::size_t p = 0; p < medoids.size(); ++p) {
        auto col = cache.column(medoids[p]);
        for (std::size_t i = 0; i < n; ++i) {
            if (col[i] < best[i]) {
                best[i] = col[i];
                out.cluster[i] = p;
            }
        }
    }
    long double total = 0.0L;
    for (double d : best) total += d;
    out.objective = static_cast<double>(total);
    return out;
}

std::vector<std::size_t> update_medoids(const DistanceCache& cache,
                                        std::span<const std::size_t> assignment,
                                        std::size_t clusters) {
    std::vector<std::vector<std::size_t>> members(clusters);
    for (std::size_t i = 0; i < assignment.size(); ++i) members.at(assignment[i]).push_back(i);

    std::vector<std::size_t> medoids(clusters);
    for (std::size_t k = 0; k < clusters; ++k) {
        const auto& group = members[k];
        if (group.empty()) {
            throw Error(ErrorCode::EmptyClusterEncountered, "cluster " + std::to_string(k));
        }
        long double best_total = std::numeric_limits<long double>::infinity();
        std::size_t best = group.front();
        for (auto m : group) {
            long double total = 0.0L;
            for (auto p : group) total += cache(m, p);
            if (total < best_total) {
                best_total = total;
                best = m;
            }
        }
        medoids[k] = best;
    }
    return medoids;
}

namespace {

std::vector<std::size_t> sizes_of(std::span<const std::size_t> assignment, std::size_t clusters) {
    std::vector<std::size_t> sizes(clusters, 0);
    for (auto k : assignment) ++sizes[k];
    return sizes;
}

/// Deletes medoids whose cluster is empty and renumbers the assignment.
/// Returns the number removed.
std::size_t drop_empty_clusters(std::vector<std::size_t>& medoids,
                                std::vector<std::size_t>& assignment) {
    const auto sizes = sizes_of(assignment, medoids.size());
    std::vector<std::size_t> remap(medoids.size());
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < medoids.size(); ++k) {
        remap[k] = kept.size();
        if (sizes[k] > 0) kept.push_back(medoids[k]);
    }
    const auto removed = medoids.size() - kept.size();
    if (removed == 0) return 0;
    for (auto& k : assignment) k = remap[k];
    medoids = std::move(kept);
    return removed;
}

}  // namespace

ClusteringResult cluster(const NumericDataset& dataset, std::size_t c,
                         const ClusterConfig& config) {
    const auto n = dataset.rows();
    if (c < 1 || c > n) {
        throw Error(ErrorCode::InvalidClusterCount,
                    "cluster count " + std::to_string(c) + " outside [1, " + std::to_string(n) + "]");
    }
    if (config.require_standardized && !dataset.provenance.value("standardized", false)) {
        throw Error(ErrorCode::ConfigInvalid, "dataset is not marked as standardized");
    }
    dataset.check_finite();

    const DistanceCache cache(dataset, config.distance_cache_cap);
    ClusteringResult result;
    result.medoids = select_initial_medoids(cache, c);

    auto step = assign(cache, result.medoids);
    result.assignment = std::move(step.cluster);
    result.objective = step.objective;
    result.removed_empty += drop_empty_clusters(result.medoids, result.assignment);
    result.objective_trace.push_back(result.objective);

    while (result.iterations < config.max_iterations) {
        auto medoids = update_medoids(cache, result.assignment, result.medoids.size());
        step = assign(cache, medoids);
        ++result.iterations;
        result.removed_empty += drop_empty_clusters(medoids, step.cluster);

        const double previous = result.objective;
        result.medoids = std::move(medoids);
        result.assignment = std::move(step.cluster);
        result.objective = step.objective;
        result.objective_trace.push_back(result.objective);

        if (std::fabs(result.objective - previous) <= config.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.cluster_sizes = sizes_of(result.assignment, result.medoids.size());
    return result;
}

double medoid_objective(const NumericDataset& dataset, std::span<const std::size_t> medoids,
                        std::span<const std::size_t> assignment) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        total += euclidean(dataset.row(i), dataset.row(medoids[assignment[i]]));
    }
    return static_cast<double>(total);
}

nlohmann::json ClusterConfig::to_json() const {
    return {{"max_iterations", max_iterations},
            {"tolerance", tolerance},
            {"distance_cache_cap", distance_cache_cap},
            {"require_standardized", require_standardized}};
}

nlohmann::json to_json(const ClusteringResult& result, const NumericDataset& dataset,
                       const ClusterConfig& config) {
    const auto& ids = dataset.row_ids();
    nlohmann::json medoids = nlohmann::json::array();
    for (auto m : result.medoids) medoids.push_back(ids[m]);
    nlohmann::json assignment = nlohmann::json::array();
    for (std::size_t i = 0; i < result.assignment.size(); ++i) {
        assignment.push_back({ids[i], result.assignment[i]});
    }
    return {{"method", "new-medoid"},
            {"config", config.to_json()},
            {"dataset", {{"rows", dataset.rows()},
                         {"cols", dataset.cols()},
                         {"fingerprint", hex64(fingerprint(dataset))}}},
            {"clusters", result.medoids.size()},
            {"medoid_row_ids", std::move(medoids)},
            {"cluster_sizes", result.cluster_sizes},
            {"objective", result.objective},
            {"objective_trace", result.objective_trace},
            {"iterations", result.iterations},
            {"converged", result.converged},
            {"removed_empty", result.removed_empty},
            {"assignment", std::move(assignment)}};
}

// ---------------------------------------------------------------------------
// K-means

std::vector<double> cluster_mean(const NumericDataset& dataset,
                                 std::span<const std::size_t> members) {
    if (members.empty()) throw Error(ErrorCode::EmptyCluster, "mean of an empty cluster");
    std::vector<long double> acc(dataset.cols(), 0.0L);
    for (auto i : members) {
        auto r = dataset.row(i);
        for (std::size_t f = 0; f < r.size(); ++f) acc[f] += r[f];
    }
    std::vector<double> mean(acc.size());
    for (std::size_t f = 0; f < acc.size(); ++f) {
        mean[f] = static_cast<double>(acc[f] / static_cast<long double>(members.size()));
    }
    return mean;
}

std::vector<double> cluster_mean(const std::vector<std::vector<double>>& members) {
    if (members.empty()) throw Error(ErrorCode::EmptyCluster, "mean of an empty cluster");
    NumericDataset ds(members.front().size());
    for (std::size_t i = 0; i < members.size(); ++i) ds.append(i, members[i]);
    std::vector<std::size_t> all(members.size());
    std::iota(all.begin(), all.end(), 0);
    return cluster_mean(ds, all);
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return sum;
}

std::vector<std::size_t> nearest_centroids(const NumericDataset& data,
                                           const std::vector<double>& centroids, std::size_t c) {
    const auto d = data.cols();
    std::vector<std::size_t> out(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < c; ++k) {
            const double dist = squared_distance(data.row(i), {centroids.data() + k * d, d});
            if (dist < best) {
                best = dist;
                out[i] = k;
            }
        }
    }
    return out;
}

}  // namespace

KMeansResult kmeans_cluster(const NumericDataset& dataset, std::size_t c,
                            const KMeansConfig& config) {
    const auto n = dataset.rows();
    const auto d = dataset.cols();
    if (c < 1 || c > n) {
        throw Error(ErrorCode::InvalidClusterCount,
                    "cluster count " + std::to_string(c) + " outside [1, " + std::to_string(n) + "]");
    }
    dataset.check_finite();

    std::vector<std::size_t> seeds;
    if (config.init == KMeansInit::Medoid) {
        const DistanceCache cache(dataset, config.distance_cache_cap);
        seeds = select_initial_medoids(cache, c);
    } else {
        std::mt19937_64 rng(config.seed);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        seeds.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(c));
    }

    KMeansResult result;
    result.dims = d;
    result.centroids.resize(c * d);
    for (std::size_t k = 0; k < c; ++k) {
        auto r = dataset.row(seeds[k]);
        std::copy(r.begin(), r.end(), result.centroids.begin() + static_cast<std::ptrdiff_t>(k * d));
    }
    result.assignment = nearest_centroids(dataset, result.centroids, c);

    auto recompute = [&](bool reseed) {
        std::vector<std::vector<std::size_t>> members(c);
        for (std::size_t i = 0; i < n; ++i) members[result.assignment[i]].push_back(i);
        std::vector<bool> taken(n, false);
        for (std::size_t k = 0; k < c; ++k) {
            auto dst = result.centroids.begin() + static_cast<std::ptrdiff_t>(k * d);
            if (!members[k].empty()) {
                auto mean = cluster_mean(dataset, members[k]);
                std::copy(mean.begin(), mean.end(), dst);
                continue;
            }
            if (!reseed) continue;
            // Farthest row from the centroid it is currently assigned to.
            double worst = -1.0;
            std::size_t pick = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                const double dist =
                    squared_distance(dataset.row(i), result.centroid(result.assignment[i]));
                if (dist > worst) {
                    worst = dist;
                    pick = i;
                }
            }
            taken[pick] = true;
            auto r = dataset.row(pick);
            std::copy(r.begin(), r.end(), dst);
            ++result.reseeded;
        }
    };

    while (result.iterations < config.max_iterations) {
        recompute(true);
        auto next = nearest_centroids(dataset, result.centroids, c);
        ++result.iterations;
        if (next == result.assignment) {
            result.converged = true;
            break;
        }
        result.assignment = std::move(next);
    }
    recompute(false);

    // Compact away clusters that are still empty.
    auto sizes = sizes_of(result.assignment, c);
    std::vector<std::size_t> remap(c);
    std::vector<double> kept;
    for (std::size_t k = 0; k < c; ++k) {
        remap[k] = result.cluster_sizes.size();
        if (sizes[k] == 0) continue;
        result.cluster_sizes.push_back(sizes[k]);
        auto ck = result.centroid(k);
        kept.insert(kept.end(), ck.begin(), ck.end());
    }
    result.centroids = std::move(kept);
    for (auto& k : result.assignment) k = remap[k];

    long double sse = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        sse += squared_distance(dataset.row(i), result.centroid(result.assignment[i]));
    }
    result.sse = static_cast<double>(sse);
    return result;
}

nlohmann::json KMeansConfig::to_json() const {
    return {{"max_iterations", max_iterations},
            {"init", init == KMeansInit::Medoid ? "medoid" : "random"},
            {"seed", seed},
            {"distance_cache_cap", distance_cache_cap}};
}

nlohmann::json to_json(const KMeansResult& result, const NumericDataset& dataset,
                       const KMeansConfig& config) {
    const auto& ids = dataset.row_ids();
    nlohmann::json centroids = nlohmann::json::array();
    for (std::size_t k = 0; k < result.clusters(); ++k) {
        auto ck = result.centroid(k);
        centroids.push_back(std::vector<double>(ck.begin(), ck.end()));
    }
    nlohmann::json assignment = nlohmann::json::array();
    for (std::size_t i = 0; i < result.assignment.size(); ++i) {
        assignment.push_back({ids[i], result.assignment[i]});
    }
    return {{"method", "kmeans"},
            {"config", config.to_json()},
            {"dataset", {{"rows", dataset.rows()},
                         {"cols", dataset.cols()},
                         {"fingerprint", hex64(fingerprint(dataset))}}},
            {"clusters", result.clusters()},
            {"cluster_sizes", result.cluster_sizes},
            {"sse", result.sse},
            {"iterations", result.iterations},
            {"converged", result.converged},
            {"reseeded", result.reseeded},
            {"centroids", std::move(centroids)},
            {"assignment", std::move(assignment)}};
}

}  // namespace nids
