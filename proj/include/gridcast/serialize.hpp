#pragma once

#include <json.hpp>
#include <string>

#include "gridcast/pipeline.hpp"
#include "gridcast/sensitivity.hpp"
#include "gridcast/synth.hpp"

namespace gridcast {

using Json = nlohmann::json;

inline constexpr std::string_view kModelFileVersion = "gridcast-mlp/1";

// Catalog file: a JSON array of
// {feature, candidates: [{kind, degree?, beta[], sse, r2, adj_r2, rmse, dof}], winner}.
Json catalog_to_json(const ModelCatalog& catalog);
ModelCatalog catalog_from_json(const Json& j, Target target);

// Model file: {version, feature_spec, w, b_hidden, v, b_out, g, f, config, metrics}.
Json model_to_json(const TrainedForecaster& forecaster, const ElmConfig& cfg);
/// Returns the forecaster plus the config it was trained with.
std::pair<TrainedForecaster, ElmConfig> model_from_json(const Json& j);

Json sensitivity_to_json(const SensitivityReport& report);
std::string sensitivity_to_csv(const SensitivityReport& report);

Json ground_truth_to_json(const GroundTruth& truth);

Json synthetic_spec_to_json(const SyntheticSpec& spec);
/// Missing keys keep their default values; unknown keys are rejected.
SyntheticSpec synthetic_spec_from_json(const Json& j);

/// Table-style per-candidate metrics dump:
/// feature,kind,degree,sse,r_square,adj_r_square,rmse,dof,winner.
std::string fit_table_to_csv(const ModelCatalog& catalog);

/// Per-day actual vs hybrid vs baseline values for plotting.
std::string predictions_to_csv(const Dataset& ds, const Matrix& hybrid, const Matrix& baseline);

/// date,n_hat,m_hat with forecasts clamped at zero.
std::string forecast_to_csv(const Dataset& ds, const Matrix& hybrid);

Json train_metrics_to_json(const TrainReport& report);

/// Parses a file as JSON; throws IoError with the path on failure.
Json load_json(const std::string& path);
void save_json(const Json& j, const std::string& path);

}  // namespace gridcast
