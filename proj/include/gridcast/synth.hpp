#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "gridcast/regression.hpp"
#include "gridcast/types.hpp"

namespace gridcast {

/// Knobs for the hourly weather marginals. Defaults sketch a Florida-like
/// climate: hot wet summers with lightning bursts, mild winters, pressure
/// near 30 inHg.
struct Marginals {
  double temp_annual_mean_f = 74.0;
  double temp_seasonal_amp_f = 13.0;
  double temp_diurnal_amp_f = 7.5;
  double temp_noise_sd_f = 1.6;

  double pressure_base_inhg = 30.0;
  double pressure_step_sd = 0.006;
  double pressure_reversion = 0.004;  // hourly pull toward the base
  double pressure_min = 29.55;
  double pressure_max = 30.45;

  double wind_mean_mph = 7.5;
  double wind_reversion = 0.12;
  double wind_step_sd = 1.1;
  double wind_max_mph = 38.0;
  double gust_max_mph = 16.0;  // extra wind during storm hours

  double rain_base_prob = 0.14;    // wet-day probability, dry season
  double rain_summer_prob = 0.30;  // added at the wet-season peak
  double rain_mean_in = 0.45;      // mean wet-day total, dry season
  double rain_summer_mean_in = 0.95;

  double lightning_rate = 700.0;  // mean strikes on a peak-season storm day
  /// 1 ties lightning to the rain bursts (realistic); 0 draws it as an
  /// independent daily process, which planted-signal tests use so credit for
  /// lightning-driven variance cannot leak into correlated storm features.
  double lightning_storm_coupling = 1.0;
};

/// Response of one output to one weather feature, in the same families the
/// regression module fits.
struct ResponseSpec {
  RegressionModel model;  // model.input_name names the driving feature
};

struct SyntheticSpec {
  int days = 850;
  std::uint64_t seed = 1;
  Date start_date{2015, 1, 1};
  double base_temp_f = 65.0;
  double noise_delta = 3.0;  // epsilon ~ Normal(0, delta^2) on each output
  /// Product term rain * lightning feeding N; 0 disables it. This is the
  /// cross-parameter effect a sum of single-feature regressions cannot see.
  double interaction_rain_lightning = 0.0;
  std::vector<ResponseSpec> responses_n;
  std::vector<ResponseSpec> responses_m;
  Marginals marginals;
};

/// The generating truth, recorded so tests can score against it.
struct GroundTruth {
  std::uint64_t seed = 0;
  double noise_delta = 0.0;
  double interaction_rain_lightning = 0.0;
  std::vector<ResponseSpec> responses_n;
  std::vector<ResponseSpec> responses_m;
};

struct SyntheticData {
  std::vector<HourlyWeatherRow> hourly;
  std::vector<InterruptionRow> interruptions;
  Dataset dataset;  // aligned daily records, built through the ingest path
  GroundTruth truth;
};

/// Noise-free response (responses plus interaction for N) at one day's
/// aggregated features. This is the oracle predictor tests compare against.
double response_value(const GroundTruth& truth, const DailyWeather& day, Target target);

/// Generates spec.days full days of hourly weather, aggregates them with the
/// ingest rules, applies the responses plus noise, and rounds/clamps into
/// non-negative integer counts. Bit-identical for identical specs.
/// Throws ConfigError (days < 60 or delta < 0).
SyntheticData generate(const SyntheticSpec& spec);

/// Full 11-feature response set with an interaction term and noise; the
/// spec used by the end-to-end training comparisons.
SyntheticSpec default_spec(std::uint64_t seed);

/// Lightning carries 5x the per-unit coefficient of every other driver on
/// both outputs; used by the sensitivity-ranking checks.
SyntheticSpec planted_lightning_spec(std::uint64_t seed);

/// Noise-free spec whose outputs respond to exactly one feature; the
/// per-feature regression recovery oracle. For integer-exact targets pick an
/// integer-valued feature (lightning) and integer coefficients.
SyntheticSpec single_driver_spec(std::uint64_t seed, std::string_view feature,
                                 const RegressionModel& response);

}  // namespace gridcast
