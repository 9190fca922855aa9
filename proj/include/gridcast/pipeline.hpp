#pragma once

#include <array>

#include "gridcast/ingest.hpp"
#include "gridcast/mlp.hpp"

namespace gridcast {

/// Sum-of-regressions forecast: for each output, the catalog winners'
/// predictions summed over features, recentered by subtracting
/// (#features - 1) * train mean so the shared mean is not counted once per
/// feature. This is the statistical-model comparison point.
Matrix baseline_predictions(const ModelCatalog& n_catalog, const ModelCatalog& m_catalog,
                            const Eigen::Vector2d& train_means, const Dataset& ds);

/// Raw (unclamped) hybrid forecasts, one row per record.
Matrix hybrid_predictions(const TrainedForecaster& forecaster, const Dataset& ds);

struct TrainReport {
  SplitDataset split;
  ModelCatalog catalog_n;
  ModelCatalog catalog_m;
  TrainedForecaster forecaster;
  Eigen::Vector2d train_means{0.0, 0.0};  // per-output training means

  Eigen::Vector2d hybrid_train_mse, hybrid_validate_mse, hybrid_test_mse;
  Eigen::Vector2d baseline_train_mse, baseline_validate_mse, baseline_test_mse;
  /// 100 * (baseline_test - hybrid_test) / baseline_test, per output.
  Eigen::Vector2d reduction_pct;
};

/// The full training pipeline: chronological split, per-feature catalogs and
/// feature spec fitted on the training slice only, ELM training with restart
/// selection on the validation slice, and MSE scoring of both the hybrid and
/// the sum-of-regressions baseline on all three slices.
TrainReport run_training(const Dataset& full, std::array<double, 3> fractions,
                         const ElmConfig& cfg);

}  // namespace gridcast
