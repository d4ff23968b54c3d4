#pragma once

// Test fixtures and brute-force oracles. The oracles deliberately avoid the
// library's distance and clustering code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "nids/dataset.hpp"

namespace nids::test {

using Points = std::vector<std::vector<double>>;

inline NumericDataset make_dataset(const Points& points) {
    NumericDataset ds(points.empty() ? 0 : points.front().size());
    for (std::size_t i = 0; i < points.size(); ++i) ds.append(i, points[i]);
    return ds;
}

inline NumericDataset make_line(const std::vector<double>& xs) {
    Points pts;
    for (double x : xs) pts.push_back({x});
    return make_dataset(pts);
}

inline Points random_points(std::mt19937_64& rng, std::size_t n, std::size_t d,
                            double lo = -5.0, double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Points pts(n, std::vector<double>(d));
    for (auto& p : pts) {
        for (auto& v : p) v = u(rng);
    }
    return pts;
}

/// Clustered random data: c random centres with Gaussian scatter.
inline Points random_clusters(std::mt19937_64& rng, std::size_t n, std::size_t d, std::size_t c) {
    auto centres = random_points(rng, c, d, -10.0, 10.0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, c - 1);
    Points pts(n, std::vector<double>(d));
    for (auto& p : pts) {
        const auto& ctr = centres[pick(rng)];
        for (std::size_t k = 0; k < d; ++k) p[k] = ctr[k] + g(rng);
    }
    return pts;
}

inline double oracle_distance(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t k = 0; k < a.size(); ++k) {
        long double diff = static_cast<long double>(a[k]) - b[k];
        s += diff * diff;
    }
    return static_cast<double>(std::sqrt(s));
}

/// Sum of distances to the nearest medoid.
inline double oracle_cost(const Points& pts, const std::vector<std::size_t>& medoids) {
    long double total = 0.0L;
    for (const auto& p : pts) {
        double best = std::numeric_limits<double>::infinity();
        for (auto m : medoids) best = std::min(best, oracle_distance(p, pts[m]));
        total += best;
    }
    return static_cast<double>(total);
}

struct OracleOptimum {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> medoids;
};

/// Exhaustive search over every medoid set of size c.
inline OracleOptimum oracle_global_optimum(const Points& pts, std::size_t c) {
    OracleOptimum best;
    const auto n = pts.size();
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(c), true);
    do {
        std::vector<std::size_t> medoids;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask[i]) medoids.push_back(i);
        }
        const double cost = oracle_cost(pts, medoids);
        if (cost < best.cost) best = {cost, medoids};
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

/// Direct evaluation of the initialization score for every row.
inline std::vector<double> oracle_init_scores(const Points& pts) {
    const auto n = pts.size();
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double denom = 0.0;
        for (std::size_t k = 0; k < n; ++k) denom += oracle_distance(pts[i], pts[k]);
        if (denom == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) v[j] += oracle_distance(pts[i], pts[j]) / denom;
    }
    return v;
}

}  // namespace nids::test
