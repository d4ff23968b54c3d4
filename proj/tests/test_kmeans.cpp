#include <doctest.h>

#include <cmath>
#include <random>

#include "nids/clustering.hpp"
#include "nids/error.hpp"
#include "support.hpp"

using namespace nids;
using doctest::Approx;

TEST_CASE("cluster_mean") {
    CHECK(cluster_mean({{0, 0}, {2, 2}}) == std::vector<double>{1, 1});
    CHECK(cluster_mean({{4.5, -3}}) == std::vector<double>{4.5, -3});
    CHECK(cluster_mean({{1, 0}, {0, 1}, {2, 5}}) == std::vector<double>{1, 2});
    try {
        cluster_mean(std::vector<std::vector<double>>{});
        FAIL("expected EmptyCluster");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyCluster);
    }
}

TEST_CASE("kmeans on two separated pairs") {
    auto ds = test::make_line({0, 0.1, 10, 10.1});
    auto r = kmeans_cluster(ds, 2);
    REQUIRE(r.clusters() == 2);
    std::vector<double> centres = {r.centroid(0)[0], r.centroid(1)[0]};
    std::sort(centres.begin(), centres.end());
    CHECK(centres[0] == Approx(0.05).epsilon(1e-12));
    CHECK(centres[1] == Approx(10.05).epsilon(1e-12));
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
}

TEST_CASE("kmeans with c = n reproduces the points") {
    auto ds = test::make_dataset({{1, 2}, {3, 4}, {-5, 0}});
    auto r = kmeans_cluster(ds, 3);
    CHECK(r.sse == 0.0);
    REQUIRE(r.clusters() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        auto c = r.centroid(r.assignment[i]);
        CHECK(c[0] == ds.at(i, 0));
        CHECK(c[1] == ds.at(i, 1));
    }
}

TEST_CASE("kmeans with c = 1 gives the global mean") {
    auto ds = test::make_dataset({{1, 0}, {0, 1}, {2, 5}});
    auto r = kmeans_cluster(ds, 1);
    CHECK(r.centroid(0)[0] == Approx(1.0));
    CHECK(r.centroid(0)[1] == Approx(2.0));
}

TEST_CASE("kmeans centroids equal member means on random data") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        auto pts = test::random_clusters(rng, 150, 4, 4);
        auto ds = test::make_dataset(pts);
        KMeansConfig cfg;
        if (trial % 2) {
            cfg.init = KMeansInit::Random;
            cfg.seed = static_cast<std::uint64_t>(trial);
        }
        auto r = kmeans_cluster(ds, 4, cfg);
        REQUIRE(r.iterations <= cfg.max_iterations);
        std::size_t total = 0;
        for (std::size_t k = 0; k < r.clusters(); ++k) {
            REQUIRE(r.cluster_sizes[k] >= 1);
            total += r.cluster_sizes[k];
            std::vector<double> sum(4, 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (r.assignment[i] != k) continue;
                ++count;
                for (std::size_t f = 0; f < 4; ++f) sum[f] += pts[i][f];
            }
            for (std::size_t f = 0; f < 4; ++f) {
                REQUIRE(std::fabs(r.centroid(k)[f] - sum[f] / count) <= 1e-9);
            }
        }
        REQUIRE(total == pts.size());
    }
}

TEST_CASE("kmeans re-seeds clusters that empty out") {
    // Duplicate seeds: the second medoid-ranked row sits on top of the first,
    // so its cluster loses every member on the first pass.
    auto ds = test::make_line({0, 0, 0, 5, 10, 10.5});
    auto r = kmeans_cluster(ds, 2);
    CHECK(r.clusters() == 2);
    for (auto s : r.cluster_sizes) CHECK(s >= 1);
}

TEST_CASE("kmeans random init is seed-deterministic") {
    std::mt19937_64 rng(3);
    auto ds = test::make_dataset(test::random_clusters(rng, 100, 3, 3));
    KMeansConfig cfg;
    cfg.init = KMeansInit::Random;
    cfg.seed = 99;
    auto a = kmeans_cluster(ds, 3, cfg);
    auto b = kmeans_cluster(ds, 3, cfg);
    CHECK(a.assignment == b.assignment);
    CHECK(a.centroids == b.centroids);
}

TEST_CASE("kmeans rejects bad cluster counts") {
    auto ds = test::make_line({1, 2});
    CHECK_THROWS_AS(kmeans_cluster(ds, 0), Error);
    CHECK_THROWS_AS(kmeans_cluster(ds, 3), Error);
}
