#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "nids/dataset.hpp"

namespace nids {

/// Per-feature location and scale for (x - mean) / scale standardization.
/// The scale is the mean absolute deviation about the mean, not the
/// standard deviation.
struct StandardizationParams {
    std::vector<std::string> names;
    std::vector<double> mean;
    std::vector<double> scale;  // >= 0; 0 marks a constant feature
    std::size_t fit_rows = 0;

    std::size_t features() const noexcept { return mean.size(); }

    nlohmann::json to_json() const;
    static StandardizationParams from_json(const nlohmann::json& doc);
};

/// Sums run in ascending row order with long double accumulators.
StandardizationParams fit_standardizer(const NumericDataset& dataset);

/// Constant features (scale 0) map to 0.
NumericDataset apply_standardizer(const StandardizationParams& params,
                                  const NumericDataset& dataset);

/// x = s * scale + mean; constant features come back as their mean.
NumericDataset invert_standardizer(const StandardizationParams& params,
                                   const NumericDataset& dataset);

}  // namespace nids
