#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nids/dataset.hpp"
#include "nids/labeling.hpp"

namespace nids {

/// Positive class is "intrusion".
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + tn + fp + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// A ratio that is empty when its denominator is zero.
using Rate = std::optional<double>;

ConfusionMatrix confusion(std::span<const Verdict> predictions, std::span<const ClassLabel> truth);

/// tp / (tp + fn).
Rate detection_rate(const ConfusionMatrix& cm);
/// (tp + tn) / total. Throws EmptyEvaluation on an empty matrix.
double accuracy(const ConfusionMatrix& cm);
/// fp / (fp + tn).
Rate false_alarm_rate(const ConfusionMatrix& cm);

/// Detection rate restricted to each attack category, indexed like
/// kAttackCategories (dos, probe, r2l, u2r).
std::array<Rate, 4> per_category_rates(std::span<const Verdict> predictions,
                                       std::span<const ClassLabel> truth);

/// Published figures for one method, in percent.
struct ReferenceRow {
    const char* method;
    double detection_rate;
    double accuracy;
    double false_alarm_rate;
    double dos;
    double r2l;
    double u2r;
    double probe;
};

/// K-means, FCM, Y-means and the medoid method as reported on KDD-Cup-99.
std::span<const ReferenceRow> reference_rows();

struct MetricsReport {
    std::string method;
    std::string labeling;
    ConfusionMatrix cm;
    Rate detection_rate;
    Rate accuracy;
    Rate false_alarm_rate;
    std::array<Rate, 4> per_category{};
    nlohmann::json config = nlohmann::json::object();
};

MetricsReport build_report(std::string method, std::string labeling,
                           std::span<const Verdict> predictions, std::span<const ClassLabel> truth);

nlohmann::json to_json(const MetricsReport& report, bool with_reference = true);
nlohmann::json reference_json();

/// Long-format CSV: source,method,metric,value. Measured rows first, then the
/// published reference rows. Undefined rates leave value empty.
std::string metrics_csv(std::span<const MetricsReport> reports, bool with_reference = true);

/// Fixed-width text table of measured and published rows, in percent.
std::string comparison_table(std::span<const MetricsReport> reports);

}  // namespace nids
