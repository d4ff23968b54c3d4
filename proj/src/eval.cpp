#include "nids/eval.hpp"

#include <cstdio>
#include <sstream>

#include "nids/error.hpp"
#include "nids/io.hpp"

namespace nids {

namespace {

constexpr ReferenceRow kReference[] = {
    {"K-means", 82.3, 77.25, 5.2, 79.83, 78.12, 52.10, 62.45},
    {"FCM", 84.6, 82.13, 4.2, 83.12, 82.45, 60.10, 65.25},
    {"Y-means", 86.3, 87.15, 3.9, 89.15, 85.10, 65.12, 68.12},
    {"New medoid", 91.2, 96.38, 3.2, 96.12, 90.10, 70.51, 70.13},
};

Rate ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json rate_json(const Rate& r) {
    return r ? nlohmann::json(*r) : nlohmann::json(nullptr);
}

std::string percent(const Rate& r) {
    if (!r) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *r * 100.0);
    return buf;
}

void check_rows(std::span<const Verdict> predictions, std::span<const ClassLabel> truth) {
    if (predictions.size() != truth.size()) {
        throw Error(ErrorCode::RowMismatch, std::to_string(predictions.size()) +
                                                " predictions for " + std::to_string(truth.size()) +
                                                " labelled rows");
    }
}

}  // namespace

ConfusionMatrix confusion(std::span<const Verdict> predictions, std::span<const ClassLabel> truth) {
    check_rows(predictions, truth);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool flagged = predictions[i] == Verdict::Anomalous;
        if (truth[i].is_attack()) {
            ++(flagged ? cm.tp : cm.fn);
        } else {
            ++(flagged ? cm.fp : cm.tn);
        }
    }
    return cm;
}

Rate detection_rate(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fn); }

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw Error(ErrorCode::EmptyEvaluation, "no instances evaluated");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

Rate false_alarm_rate(const ConfusionMatrix& cm) { return ratio(cm.fp, cm.fp + cm.tn); }

std::array<Rate, 4> per_category_rates(std::span<const Verdict> predictions,
                                       std::span<const ClassLabel> truth) {
    check_rows(predictions, truth);
    std::array<std::size_t, 4> hit{};
    std::array<std::size_t, 4> seen{};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!truth[i].is_attack()) continue;
        const auto k = static_cast<std::size_t>(truth[i].category) - 1;
        ++seen[k];
        if (predictions[i] == Verdict::Anomalous) ++hit[k];
    }
    std::array<Rate, 4> out;
    for (std::size_t k = 0; k < 4; ++k) out[k] = ratio(hit[k], seen[k]);
    return out;
}

std::span<const ReferenceRow> reference_rows() { return kReference; }

MetricsReport build_report(std::string method, std::string labeling,
                           std::span<const Verdict> predictions, std::span<const ClassLabel> truth) {
    MetricsReport r;
    r.method = std::move(method);
    r.labeling = std::move(labeling);
    r.cm = confusion(predictions, truth);
    r.detection_rate = detection_rate(r.cm);
    if (r.cm.total() > 0) r.accuracy = accuracy(r.cm);
    r.false_alarm_rate = false_alarm_rate(r.cm);
    r.per_category = per_category_rates(predictions, truth);
    return r;
}

nlohmann::json reference_json() {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : kReference) {
        rows.push_back({{"method", row.method},
                        {"detection_rate_pct", row.detection_rate},
                        {"accuracy_pct", row.accuracy},
                        {"false_alarm_rate_pct", row.false_alarm_rate},
                        {"per_category_pct",
                         {{"dos", row.dos}, {"r2l", row.r2l}, {"u2r", row.u2r}, {"probe", row.probe}}}});
    }
    return {{"source", "published KDD-Cup-99 results; static, not recomputed"},
            {"rows", std::move(rows)}};
}

nlohmann::json to_json(const MetricsReport& report, bool with_reference) {
    nlohmann::json per_category = nlohmann::json::object();
    for (std::size_t k = 0; k < 4; ++k) {
        per_category[std::string(to_string(kAttackCategories[k]))] = rate_json(report.per_category[k]);
    }
    nlohmann::json doc = {
        {"method", report.method},
        {"labeling", report.labeling},
        {"confusion", {{"tp", report.cm.tp}, {"tn", report.cm.tn}, {"fp", report.cm.fp}, {"fn", report.cm.fn}}},
        {"detection_rate", rate_json(report.detection_rate)},
        {"accuracy", rate_json(report.accuracy)},
        {"false_alarm_rate", rate_json(report.false_alarm_rate)},
        {"per_category", std::move(per_category)},
        {"config", report.config},
    };
    if (with_reference) doc["reference"] = reference_json();
    return doc;
}

std::string metrics_csv(std::span<const MetricsReport> reports, bool with_reference) {
    std::ostringstream out;
    out << "source,method,metric,value\n";
    auto emit = [&](const char* source, const std::string& method, std::string_view metric,
                    const Rate& value) {
        out << source << ',' << method << ',' << metric << ',';
        if (value) out << format_double(*value);
        out << '\n';
    };
    for (const auto& r : reports) {
        emit("measured", r.method, "detection_rate", r.detection_rate);
        emit("measured", r.method, "accuracy", r.accuracy);
        emit("measured", r.method, "false_alarm_rate", r.false_alarm_rate);
        for (std::size_t k = 0; k < 4; ++k) {
            emit("measured", r.method, std::string(to_string(kAttackCategories[k])) + "_detection_rate",
                 r.per_category[k]);
        }
    }
    if (with_reference) {
        for (const auto& row : kReference) {
            const std::string m = row.method;
            emit("published", m, "detection_rate", row.detection_rate / 100.0);
            emit("published", m, "accuracy", row.accuracy / 100.0);
            emit("published", m, "false_alarm_rate", row.false_alarm_rate / 100.0);
            emit("published", m, "dos_detection_rate", row.dos / 100.0);
            emit("published", m, "probe_detection_rate", row.probe / 100.0);
            emit("published", m, "r2l_detection_rate", row.r2l / 100.0);
            emit("published", m, "u2r_detection_rate", row.u2r / 100.0);
        }
    }
    return out.str();
}

std::string comparison_table(std::span<const MetricsReport> reports) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-28s %8s %8s %8s %8s %8s %8s %8s\n", "method", "DR%",
                  "Acc%", "FAR%", "DoS%", "Probe%", "R2L%", "U2R%");
    out << line;
    for (const auto& r : reports) {
        auto name = "measured: " + r.method;
        std::snprintf(line, sizeof(line), "%-28s %8s %8s %8s %8s %8s %8s %8s\n", name.c_str(),
                      percent(r.detection_rate).c_str(), percent(r.accuracy).c_str(),
                      percent(r.false_alarm_rate).c_str(), percent(r.per_category[0]).c_str(),
                      percent(r.per_category[1]).c_str(), percent(r.per_category[2]).c_str(),
                      percent(r.per_category[3]).c_str());
        out << line;
    }
    for (const auto& row : kReference) {
        auto name = std::string("published: ") + row.method;
        std::snprintf(line, sizeof(line), "%-28s %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f\n",
                      name.c_str(), row.detection_rate, row.accuracy, row.false_alarm_rate, row.dos,
                      row.probe, row.r2l, row.u2r);
        out << line;
    }
    return out.str();
}

}  // namespace nids
