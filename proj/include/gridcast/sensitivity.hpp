#pragma once

#include <array>
#include <string>
#include <vector>

#include "gridcast/mlp.hpp"

namespace gridcast {

/// Derivatives of both outputs with respect to every network input:
/// result(i, o) = dY_o / dx_i = sum_j v(j,o) G'(z_j) w(j,i).
/// Throws DimensionMismatch.
Matrix analytic_input_gradient(const MlpNetwork& net, ConstVectorRef x);

/// Pulls an input-space gradient back to the 11 raw weather parameters at a
/// given record: each parameter collects its raw-input path plus every
/// regression-derived path it feeds (per-feature prediction and the two
/// aggregate means), with the normalization scales chained in. Result is
/// 11 x 2 in raw parameter units.
Matrix chain_to_raw(ConstMatrixRef input_gradient, const FeatureSpec& spec,
                    const DailyRecord& record);

/// Raw-parameter derivatives of the full build_features -> forward
/// composition for one record.
Matrix raw_gradient(const TrainedForecaster& forecaster, const DailyRecord& record);

struct SensitivityReport {
  std::vector<std::string> parameters;              // the 11, canonical order
  Matrix scores;                                    // 11 x 2; per output sums to 1
  std::array<std::vector<std::string>, 2> ranked;   // descending by score
};

/// Mean absolute raw-parameter derivative over the dataset, normalized per
/// output to sum to 1.
SensitivityReport aggregate(const TrainedForecaster& forecaster, const Dataset& ds);

}  // namespace gridcast
