#include <doctest.h>

#include "gridcast/pipeline.hpp"
#include "gridcast/serialize.hpp"
#include "gridcast/synth.hpp"

using namespace gridcast;

TEST_CASE("run_training beats the sum-of-regressions baseline on default synthetic data") {
  for (const std::uint64_t seed : {1ull, 2ull}) {
    const SyntheticData data = generate(default_spec(seed));
    ElmConfig cfg;
    cfg.seed = seed;
    const TrainReport report = run_training(data.dataset, kDefaultFractions, cfg);
    CHECK(report.hybrid_test_mse[0] < report.baseline_test_mse[0]);
    CHECK(report.hybrid_test_mse[1] < report.baseline_test_mse[1]);
    CHECK(report.reduction_pct[0] > 0.0);
    CHECK(report.reduction_pct[1] > 0.0);
    CHECK(report.forecaster.test_mse.has_value());
  }
}

TEST_CASE("baseline recenters by (features - 1) times the training mean") {
  const SyntheticData data = generate(default_spec(31));
  Dataset ds = data.dataset;
  ds.records.resize(100);
  const ModelCatalog n_cat = fit_catalog(ds, Target::sustained);
  const ModelCatalog m_cat = fit_catalog(ds, Target::momentary);
  const Eigen::Vector2d means = target_matrix(ds).colwise().mean();
  const Matrix baseline = baseline_predictions(n_cat, m_cat, means, ds);

  // Recompute by hand for the first record.
  const DailyRecord& record = ds.records[0];
  for (int o = 0; o < 2; ++o) {
    const ModelCatalog& catalog = o == 0 ? n_cat : m_cat;
    double sum = 0.0;
    for (const auto& entry : catalog.entries) {
      sum += evaluate(entry.winning_model(),
                      feature_value(record, feature_index(entry.feature)));
    }
    sum -= (static_cast<double>(catalog.entries.size()) - 1.0) * means[o];
    CHECK(baseline(0, o) == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("model JSON round-trips the forecaster") {
  const SyntheticData data = generate(default_spec(8));
  ElmConfig cfg;
  cfg.seed = 8;
  cfg.restarts = 3;
  const TrainReport report = run_training(data.dataset, kDefaultFractions, cfg);

  const Json j = model_to_json(report.forecaster, cfg);
  CHECK(j.at("version") == "gridcast-mlp/1");
  CHECK(j.at("g") == "sigmoid");
  CHECK(j.at("f") == "identity");

  const auto [loaded, loaded_cfg] = model_from_json(j);
  CHECK(loaded.network.w == report.forecaster.network.w);
  CHECK(loaded.network.b_hidden == report.forecaster.network.b_hidden);
  CHECK(loaded.network.v == report.forecaster.network.v);
  CHECK(loaded.network.b_out == report.forecaster.network.b_out);
  CHECK(loaded_cfg.seed == cfg.seed);
  CHECK(loaded_cfg.restarts == cfg.restarts);
  REQUIRE(loaded.test_mse.has_value());
  CHECK((*loaded.test_mse)[0] == (*report.forecaster.test_mse)[0]);

  // Forecasts from the reloaded model are identical.
  const Matrix before = hybrid_predictions(report.forecaster, report.split.test);
  const Matrix after = hybrid_predictions(loaded, report.split.test);
  CHECK((before - after).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("catalog JSON round-trips entries and winners") {
  const SyntheticData data = generate(default_spec(9));
  Dataset ds = data.dataset;
  ds.records.resize(80);
  const ModelCatalog catalog = fit_catalog(ds, Target::sustained);
  const Json j = catalog_to_json(catalog);
  REQUIRE(j.is_array());
  const ModelCatalog loaded = catalog_from_json(j, Target::sustained);
  REQUIRE(loaded.entries.size() == catalog.entries.size());
  for (std::size_t i = 0; i < catalog.entries.size(); ++i) {
    CHECK(loaded.entries[i].feature == catalog.entries[i].feature);
    CHECK(loaded.entries[i].winner == catalog.entries[i].winner);
    CHECK(loaded.entries[i].candidates.size() == catalog.entries[i].candidates.size());
    const auto& a = loaded.entries[i].winning_model();
    const auto& b = catalog.entries[i].winning_model();
    CHECK(a.kind == b.kind);
    CHECK(a.beta == b.beta);
  }
}
