#include "nids/preprocess.hpp"

#include <cmath>

#include "nids/error.hpp"

namespace nids {

namespace {

void check_width(const StandardizationParams& params, const NumericDataset& dataset) {
    if (params.features() != dataset.cols() || params.scale.size() != params.features()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "standardizer fit on " + std::to_string(params.features()) +
                        " features, dataset has " + std::to_string(dataset.cols()));
    }
}

}  // namespace

StandardizationParams fit_standardizer(const NumericDataset& dataset) {
    const auto n = dataset.rows();
    const auto d = dataset.cols();
    if (n == 0) throw Error(ErrorCode::EmptyDataset, "cannot fit a standardizer on zero rows");
    dataset.check_finite();

    StandardizationParams params;
    params.fit_rows = n;
    params.mean.assign(d, 0.0);
    params.scale.assign(d, 0.0);
    for (const auto& col : dataset.schema()) params.names.push_back(col.name);

    std::vector<long double> acc(d, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = dataset.row(i);
        for (std::size_t f = 0; f < d; ++f) acc[f] += r[f];
    }
    for (std::size_t f = 0; f < d; ++f) {
        params.mean[f] = static_cast<double>(acc[f] / static_cast<long double>(n));
        acc[f] = 0.0L;
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto r = dataset.row(i);
        for (std::size_t f = 0; f < d; ++f) {
            acc[f] += std::fabs(static_cast<long double>(r[f]) - params.mean[f]);
        }
    }
    for (std::size_t f = 0; f < d; ++f) {
        params.scale[f] = static_cast<double>(acc[f] / static_cast<long double>(n));
    }
    return params;
}

NumericDataset apply_standardizer(const StandardizationParams& params,
                                  const NumericDataset& dataset) {
    check_width(params, dataset);
    NumericDataset out = dataset;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t f = 0; f < r.size(); ++f) {
            r[f] = params.scale[f] > 0.0 ? (r[f] - params.mean[f]) / params.scale[f] : 0.0;
        }
    }
    out.check_finite();
    out.provenance["standardized"] = true;
    return out;
}

NumericDataset invert_standardizer(const StandardizationParams& params,
                                   const NumericDataset& dataset) {
    check_width(params, dataset);
    NumericDataset out = dataset;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t f = 0; f < r.size(); ++f) {
            r[f] = r[f] * params.scale[f] + params.mean[f];
        }
    }
    out.provenance.erase("standardized");
    return out;
}

nlohmann::json StandardizationParams::to_json() const {
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t f = 0; f < mean.size(); ++f) {
        features.push_back({{"name", f < names.size() ? names[f] : "f" + std::to_string(f)},
                            {"mean", mean[f]},
                            {"scale", scale[f]}});
    }
    return {{"scale_kind", "mean_absolute_deviation"},
            {"fit_rows", fit_rows},
            {"features", std::move(features)}};
}

StandardizationParams StandardizationParams::from_json(const nlohmann::json& doc) {
    StandardizationParams p;
    try {
        p.fit_rows = doc.at("fit_rows");
        for (const auto& f : doc.at("features")) {
            p.names.push_back(f.at("name"));
            p.mean.push_back(f.at("mean"));
            p.scale.push_back(f.at("scale"));
            if (!(p.scale.back() >= 0.0)) {
                throw Error(ErrorCode::DataError, "negative scale for " + p.names.back());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::DataError, std::string("standardizer json: ") + e.what());
    }
    return p;
}

}  // namespace nids
