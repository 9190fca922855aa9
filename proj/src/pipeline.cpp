#include "gridcast/pipeline.hpp"

#include "gridcast/errors.hpp"

namespace gridcast {

namespace {

Vector catalog_sum(const ModelCatalog& catalog, double train_mean, const Dataset& ds) {
  const Eigen::Index n = static_cast<Eigen::Index>(ds.size());
  Vector out = Vector::Zero(n);
  for (const auto& entry : catalog.entries) {
    const int idx = feature_index(entry.feature);
    if (idx < 0) throw MissingCatalogEntry(entry.feature);
    const auto& model = entry.winning_model();
    for (Eigen::Index i = 0; i < n; ++i) {
      out[i] += evaluate(model, feature_value(ds.records[static_cast<std::size_t>(i)], idx));
    }
  }
  const double overcount = static_cast<double>(catalog.entries.size()) - 1.0;
  out.array() -= overcount * train_mean;
  return out;
}

}  // namespace

Matrix baseline_predictions(const ModelCatalog& n_catalog, const ModelCatalog& m_catalog,
                            const Eigen::Vector2d& train_means, const Dataset& ds) {
  Matrix out(static_cast<Eigen::Index>(ds.size()), kOutputCount);
  out.col(0) = catalog_sum(n_catalog, train_means[0], ds);
  out.col(1) = catalog_sum(m_catalog, train_means[1], ds);
  return out;
}

Matrix hybrid_predictions(const TrainedForecaster& forecaster, const Dataset& ds) {
  return forward_all(forecaster.network, build_feature_matrix(ds, forecaster.feature_spec));
}

TrainReport run_training(const Dataset& full, std::array<double, 3> fractions,
                         const ElmConfig& cfg) {
  TrainReport report;
  report.split = split_chronological(full, fractions);
  const Dataset& train = report.split.train;

  report.catalog_n = fit_catalog(train, Target::sustained);
  report.catalog_m = fit_catalog(train, Target::momentary);
  const FeatureSpec spec = make_feature_spec(train, report.catalog_n, report.catalog_m);

  report.forecaster = elm_train(train, report.split.validate, spec, cfg);

  report.train_means = target_matrix(train).colwise().mean();

  const auto score = [&](const Dataset& ds, Eigen::Vector2d& hybrid, Eigen::Vector2d& baseline) {
    const Matrix targets = target_matrix(ds);
    hybrid = mse(hybrid_predictions(report.forecaster, ds), targets);
    baseline = mse(
        baseline_predictions(report.catalog_n, report.catalog_m, report.train_means, ds), targets);
  };
  score(train, report.hybrid_train_mse, report.baseline_train_mse);
  score(report.split.validate, report.hybrid_validate_mse, report.baseline_validate_mse);
  score(report.split.test, report.hybrid_test_mse, report.baseline_test_mse);
  report.forecaster.test_mse = report.hybrid_test_mse;

  for (int o = 0; o < kOutputCount; ++o) {
    report.reduction_pct[o] = report.baseline_test_mse[o] > 0.0
                                  ? 100.0 * (report.baseline_test_mse[o] - report.hybrid_test_mse[o]) /
                                        report.baseline_test_mse[o]
                                  : 0.0;
  }
  return report;
}

}  // namespace gridcast
