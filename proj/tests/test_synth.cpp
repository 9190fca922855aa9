#include <doctest.h>

#include <cmath>

#include "gridcast/errors.hpp"
#include "gridcast/pipeline.hpp"
#include "gridcast/regression.hpp"
#include "gridcast/synth.hpp"

using namespace gridcast;

TEST_CASE("generate is bit-identical for identical specs") {
  SyntheticSpec spec = default_spec(99);
  spec.days = 120;
  const SyntheticData a = generate(spec);
  const SyntheticData b = generate(spec);
  REQUIRE(a.hourly.size() == b.hourly.size());
  REQUIRE(a.dataset.size() == b.dataset.size());
  for (std::size_t i = 0; i < a.hourly.size(); ++i) {
    CHECK(a.hourly[i].temperature_f == b.hourly[i].temperature_f);
    CHECK(a.hourly[i].precip_in == b.hourly[i].precip_in);
    CHECK(a.hourly[i].pressure_inhg == b.hourly[i].pressure_inhg);
    CHECK(a.hourly[i].wind_mph == b.hourly[i].wind_mph);
    CHECK(a.hourly[i].lightning == b.hourly[i].lightning);
  }
  for (std::size_t i = 0; i < a.dataset.size(); ++i) {
    CHECK(a.dataset.records[i].n_sustained == b.dataset.records[i].n_sustained);
    CHECK(a.dataset.records[i].m_momentary == b.dataset.records[i].m_momentary);
  }
  // Different seed diverges.
  SyntheticSpec other = spec;
  other.seed = 100;
  const SyntheticData c = generate(other);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.hourly.size() && !any_difference; ++i) {
    any_difference = a.hourly[i].temperature_f != c.hourly[i].temperature_f;
  }
  CHECK(any_difference);
}

TEST_CASE("generated days satisfy the documented invariants") {
  SyntheticSpec spec = default_spec(42);
  spec.days = 200;
  const SyntheticData data = generate(spec);
  REQUIRE(data.dataset.size() == 200);
  REQUIRE(data.hourly.size() == 200 * 24);
  for (const auto& record : data.dataset.records) {
    const auto& w = record.weather;
    CHECK(w.t_min <= w.t_ave);
    CHECK(w.t_ave <= w.t_max);
    CHECK(w.w_ave <= w.w_pea);
    CHECK(w.hdd * w.cdd == 0.0);
    CHECK(record.n_sustained >= 0.0);
    CHECK(record.m_momentary >= 0.0);
    CHECK(record.n_sustained == std::floor(record.n_sustained));  // integer counts
    CHECK(record.m_momentary == std::floor(record.m_momentary));
    CHECK(w.lightning == std::floor(w.lightning));
  }
}

TEST_CASE("generate validates its spec") {
  SyntheticSpec spec = default_spec(1);
  spec.days = 59;
  CHECK_THROWS_AS(generate(spec), ConfigError);
  spec.days = 60;
  spec.noise_delta = -1.0;
  CHECK_THROWS_AS(generate(spec), ConfigError);
}

TEST_CASE("noise-free single-driver data is reproduced exactly by its winner") {
  RegressionModel response;
  response.kind = ModelKind::polynomial;
  response.degree = 1;
  response.beta = Vector::Zero(2);
  response.beta << 5.0, 2.0;
  const SyntheticData data = generate(single_driver_spec(77, "lightning", response));

  const ModelCatalog catalog = fit_catalog(data.dataset, Target::sustained);
  const CatalogEntry* entry = catalog.find("lightning");
  REQUIRE(entry != nullptr);
  const RegressionModel& winner = entry->winning_model();
  CHECK(winner.degree == 1);
  CHECK(winner.beta[0] == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(winner.beta[1] == doctest::Approx(2.0).epsilon(1e-6));

  // The driver winner's rounded predictions reproduce every count.
  for (const auto& record : data.dataset.records) {
    const double predicted = evaluate(winner, record.weather.lightning);
    CHECK(std::llround(std::max(0.0, predicted)) ==
          static_cast<long long>(record.n_sustained));
  }
}

TEST_CASE("an interaction term opens a gap no sum of regressions can close") {
  SyntheticSpec spec = default_spec(55);
  spec.days = 400;
  REQUIRE(spec.interaction_rain_lightning > 0.0);
  const SyntheticData data = generate(spec);
  const SplitDataset split = split_chronological(data.dataset);

  // Oracle: the generating response including the interaction term.
  double oracle_sse = 0.0;
  for (const auto& record : split.test.records) {
    const double predicted = response_value(data.truth, record.weather, Target::sustained);
    oracle_sse += std::pow(record.n_sustained - predicted, 2);
  }
  const double oracle_mse = oracle_sse / static_cast<double>(split.test.size());

  const ModelCatalog n_cat = fit_catalog(split.train, Target::sustained);
  const ModelCatalog m_cat = fit_catalog(split.train, Target::momentary);
  const Eigen::Vector2d means = target_matrix(split.train).colwise().mean();
  const Matrix baseline = baseline_predictions(n_cat, m_cat, means, split.test);
  const Eigen::Vector2d baseline_mse = mse(baseline, target_matrix(split.test));

  CHECK(baseline_mse[0] > oracle_mse);
}
