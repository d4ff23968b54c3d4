#include <doctest.h>

#include <cmath>
#include <random>

#include "nids/error.hpp"
#include "nids/preprocess.hpp"
#include "support.hpp"

using namespace nids;
using doctest::Approx;

namespace {

// Independent column statistics: plain double sums over a copied column.
struct ColumnStats {
    double mean;
    double mad;
};

ColumnStats stats(const NumericDataset& ds, std::size_t f) {
    double s = 0.0;
    for (std::size_t i = 0; i < ds.rows(); ++i) s += ds.at(i, f);
    const double mean = s / static_cast<double>(ds.rows());
    double a = 0.0;
    for (std::size_t i = 0; i < ds.rows(); ++i) a += std::fabs(ds.at(i, f) - mean);
    return {mean, a / static_cast<double>(ds.rows())};
}

NumericDataset random_with_constants(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> nd(1, 200), dd(1, 8);
    const auto n = nd(rng), d = dd(rng);
    auto pts = test::random_points(rng, n, d, -1000.0, 1000.0);
    std::uniform_real_distribution<double> scale(1e-3, 1e3);
    for (std::size_t f = 0; f < d; ++f) {
        const double s = scale(rng);
        const bool constant = f % 3 == 2;
        for (auto& p : pts) p[f] = constant ? 42.5 : p[f] * s;
    }
    return test::make_dataset(pts);
}

}  // namespace

TEST_CASE("fit_standardizer on (2, 4, 6)") {
    auto ds = test::make_line({2, 4, 6});
    auto p = fit_standardizer(ds);
    REQUIRE(p.features() == 1);
    CHECK(p.fit_rows == 3);
    CHECK(p.mean[0] == Approx(4.0).epsilon(1e-15));
    CHECK(p.scale[0] == Approx(4.0 / 3.0).epsilon(1e-15));

    auto s = apply_standardizer(p, ds);
    CHECK(s.at(0, 0) == Approx(-1.5).epsilon(1e-15));
    CHECK(s.at(1, 0) == 0.0);
    CHECK(s.at(2, 0) == Approx(1.5).epsilon(1e-15));
}

TEST_CASE("constant and single-row features have zero scale and standardize to zero") {
    auto constant = test::make_line({5, 5, 5});
    auto p = fit_standardizer(constant);
    CHECK(p.mean[0] == 5.0);
    CHECK(p.scale[0] == 0.0);
    auto s = apply_standardizer(p, constant);
    for (std::size_t i = 0; i < 3; ++i) CHECK(s.at(i, 0) == 0.0);

    auto single = test::make_dataset({{3.5, -2.0}});
    auto q = fit_standardizer(single);
    CHECK(q.mean == std::vector<double>{3.5, -2.0});
    CHECK(q.scale == std::vector<double>{0.0, 0.0});
}

TEST_CASE("a value equal to the mean standardizes to zero") {
    auto ds = test::make_line({1, 7, 4});
    auto s = apply_standardizer(fit_standardizer(ds), ds);
    CHECK(s.at(2, 0) == 0.0);
}

TEST_CASE("standardizer errors") {
    NumericDataset empty(3);
    CHECK_THROWS_AS(fit_standardizer(empty), Error);
    try {
        fit_standardizer(empty);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyDataset);
    }
    auto p = fit_standardizer(test::make_line({1, 2}));
    try {
        apply_standardizer(p, test::make_dataset({{1.0, 2.0}}));
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("standardized fit set: mean 0 and mean absolute deviation 1") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        auto ds = random_with_constants(rng);
        auto p = fit_standardizer(ds);
        auto s = apply_standardizer(p, ds);
        for (std::size_t f = 0; f < ds.cols(); ++f) {
            const auto st = stats(s, f);
            if (p.scale[f] > 0.0) {
                REQUIRE(std::fabs(st.mean) <= 1e-9);
                REQUIRE(std::fabs(st.mad - 1.0) <= 1e-9);
            } else {
                for (std::size_t i = 0; i < s.rows(); ++i) REQUIRE(s.at(i, f) == 0.0);
            }
        }
    }
}

TEST_CASE("inverse map recovers the input and refit is idempotent") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        auto ds = random_with_constants(rng);
        auto p = fit_standardizer(ds);
        auto s = apply_standardizer(p, ds);
        auto back = invert_standardizer(p, s);
        auto again = apply_standardizer(fit_standardizer(s), s);
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            for (std::size_t f = 0; f < ds.cols(); ++f) {
                if (p.scale[f] == 0.0) continue;
                const double tol = 1e-9 * std::max(1.0, std::fabs(ds.at(i, f)));
                REQUIRE(std::fabs(back.at(i, f) - ds.at(i, f)) <= tol);
                REQUIRE(std::fabs(again.at(i, f) - s.at(i, f)) <= 1e-9);
            }
        }
    }
}

TEST_CASE("params survive a JSON round-trip") {
    auto ds = test::make_dataset({{1.0, 10.0}, {2.0, 10.0}, {4.0, 10.0}});
    auto p = fit_standardizer(ds);
    auto json = p.to_json();
    CHECK(json["scale_kind"] == "mean_absolute_deviation");
    auto q = StandardizationParams::from_json(json);
    CHECK(q.mean == p.mean);
    CHECK(q.scale == p.scale);
    CHECK(q.names == p.names);
    CHECK(q.fit_rows == 3);
}

TEST_CASE("params fit on one set apply verbatim to another") {
    auto train = test::make_line({0, 2, 4});
    auto p = fit_standardizer(train);  // mean 2, scale 4/3
    auto s = apply_standardizer(p, test::make_line({6}));
    CHECK(s.at(0, 0) == Approx(3.0).epsilon(1e-15));
}
