#include <doctest.h>

#include <cmath>
#include <random>

#include "nids/error.hpp"
#include "nids/eval.hpp"

using namespace nids;

namespace {

struct Labelled {
    std::vector<Verdict> predictions;
    std::vector<ClassLabel> truth;

    void add(Category cat, Verdict v, std::size_t count = 1) {
        for (std::size_t i = 0; i < count; ++i) {
            predictions.push_back(v);
            truth.push_back({cat, std::string(to_string(cat))});
        }
    }
};

constexpr auto N = Verdict::Normal;
constexpr auto A = Verdict::Anomalous;

}  // namespace

TEST_CASE("confusion matrix counts") {
    Labelled perfect;
    perfect.add(Category::Dos, A, 10);
    perfect.add(Category::Normal, N, 90);
    CHECK(confusion(perfect.predictions, perfect.truth) == ConfusionMatrix{10, 90, 0, 0});

    Labelled lazy;
    lazy.add(Category::Probe, N, 7);
    lazy.add(Category::Normal, N, 13);
    CHECK(confusion(lazy.predictions, lazy.truth) == ConfusionMatrix{0, 13, 0, 7});

    Labelled mixed;
    mixed.add(Category::R2L, A, 45);
    mixed.add(Category::R2L, N, 5);
    mixed.add(Category::Normal, A, 2);
    mixed.add(Category::Normal, N, 48);
    CHECK(confusion(mixed.predictions, mixed.truth) == ConfusionMatrix{45, 48, 2, 5});

    mixed.truth.pop_back();
    CHECK_THROWS_AS(confusion(mixed.predictions, mixed.truth), Error);
}

TEST_CASE("rates on (45, 48, 2, 5)") {
    const ConfusionMatrix cm{45, 48, 2, 5};
    CHECK(detection_rate(cm) == 0.9);
    CHECK(accuracy(cm) == 0.93);
    CHECK(false_alarm_rate(cm) == 0.04);
}

TEST_CASE("degenerate denominators") {
    CHECK_FALSE(detection_rate({0, 10, 0, 0}).has_value());
    CHECK_FALSE(false_alarm_rate({3, 0, 0, 1}).has_value());
    CHECK(false_alarm_rate({3, 5, 0, 1}) == 0.0);
    CHECK(accuracy({5, 5, 0, 0}) == 1.0);
    try {
        accuracy({});
        FAIL("expected EmptyEvaluation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyEvaluation);
    }
}

TEST_CASE("per-category rates") {
    Labelled l;
    l.add(Category::Dos, A, 9);
    l.add(Category::Dos, N, 1);
    l.add(Category::Probe, A, 1);
    l.add(Category::R2L, N, 2);
    l.add(Category::Normal, A, 3);
    auto r = per_category_rates(l.predictions, l.truth);
    CHECK(r[0] == 0.9);
    CHECK(r[1] == 1.0);
    CHECK(r[2] == 0.0);
    CHECK_FALSE(r[3].has_value());
}

TEST_CASE("published reference rows are static") {
    auto rows = reference_rows();
    REQUIRE(rows.size() == 4);
    const auto& medoid = rows[3];
    CHECK(medoid.detection_rate == 91.2);
    CHECK(medoid.accuracy == 96.38);
    CHECK(medoid.false_alarm_rate == 3.2);
    CHECK(medoid.dos == 96.12);
    CHECK(medoid.r2l == 90.10);
    CHECK(medoid.u2r == 70.51);
    CHECK(medoid.probe == 70.13);
    CHECK(rows[0].detection_rate == 82.3);
    CHECK(rows[0].accuracy == 77.25);
    CHECK(rows[0].false_alarm_rate == 5.2);
}

TEST_CASE("metric identities on random evaluations") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> cat(0, 4), coin(0, 1);
    std::uniform_int_distribution<std::size_t> len(1, 500);
    for (int trial = 0; trial < 300; ++trial) {
        Labelled l;
        const auto n = len(rng);
        for (std::size_t i = 0; i < n; ++i) {
            l.add(static_cast<Category>(cat(rng)), coin(rng) ? A : N);
        }
        const auto cm = confusion(l.predictions, l.truth);
        REQUIRE(cm.total() == n);

        if (auto dr = detection_rate(cm)) {
            const double miss = static_cast<double>(cm.fn) / static_cast<double>(cm.tp + cm.fn);
            REQUIRE(std::fabs(*dr + miss - 1.0) <= 1e-12);

            // Category rates weighted by prevalence among attacks recompose DR.
            auto per = per_category_rates(l.predictions, l.truth);
            std::array<std::size_t, 4> seen{};
            for (const auto& t : l.truth) {
                if (t.is_attack()) ++seen[static_cast<std::size_t>(t.category) - 1];
            }
            double recomposed = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                if (per[k]) recomposed += *per[k] * seen[k] / static_cast<double>(cm.tp + cm.fn);
            }
            REQUIRE(std::fabs(recomposed - *dr) <= 1e-12);
        }
        for (auto r : {detection_rate(cm), false_alarm_rate(cm), Rate(accuracy(cm))}) {
            if (r) REQUIRE((*r >= 0.0 && *r <= 1.0));
        }

        // The all-normal predictor scores exactly the normal prevalence.
        std::vector<Verdict> silent(n, N);
        const auto quiet = confusion(silent, l.truth);
        std::size_t normals = 0;
        for (const auto& t : l.truth) normals += !t.is_attack();
        REQUIRE(accuracy(quiet) == static_cast<double>(normals) / static_cast<double>(n));
    }
}

TEST_CASE("report serialization") {
    Labelled l;
    l.add(Category::Dos, A, 3);
    l.add(Category::Normal, N, 7);
    auto report = build_report("new-medoid", "unsupervised", l.predictions, l.truth);
    auto j = to_json(report);
    CHECK(j["detection_rate"] == 1.0);
    CHECK(j["false_alarm_rate"] == 0.0);
    CHECK(j["per_category"]["u2r"].is_null());
    CHECK(j["reference"]["rows"].size() == 4);

    std::vector<MetricsReport> reports = {report};
    auto csv = metrics_csv(reports);
    CHECK(csv.rfind("source,method,metric,value\n", 0) == 0);
    CHECK(csv.find("measured,new-medoid,detection_rate,1\n") != std::string::npos);
    CHECK(csv.find("measured,new-medoid,u2r_detection_rate,\n") != std::string::npos);
    CHECK(csv.find("published,New medoid,detection_rate,0.912\n") != std::string::npos);

    auto table = comparison_table(reports);
    CHECK(table.find("measured: new-medoid") != std::string::npos);
    CHECK(table.find("published: K-means") != std::string::npos);
}
