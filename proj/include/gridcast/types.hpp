#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gridcast/date.hpp"

namespace gridcast {

/// One hour of station weather.
struct HourlyWeatherRow {
  Date date;
  int hour = 0;  // 0..23
  double temperature_f = 0.0;
  double precip_in = 0.0;      // inches accumulated over the hour
  double pressure_inhg = 0.0;  // inches of mercury
  double wind_mph = 0.0;
  long lightning = 0;  // strikes during the hour

  [[nodiscard]] std::int64_t serial_hour() const { return date.serial() * 24 + hour; }
};

/// Daily weather features aggregated from hourly rows.
struct DailyWeather {
  Date date;
  double t_max = 0.0;
  double t_ave = 0.0;
  double t_min = 0.0;
  double hdd = 0.0;  // max(0, base - t_ave)
  double cdd = 0.0;  // max(0, t_ave - base)
  double w_pea = 0.0;
  double w_ave = 0.0;
  double w_sus = 0.0;  // max 2-hour rolling mean of wind
  double p_rain = 0.0;
  double pressure = 0.0;
  double lightning = 0.0;  // integral-valued (sum of hourly counts)
};

/// One row of the interruption file.
struct InterruptionRow {
  Date date;
  long n_sustained = 0;
  long m_momentary = 0;
};

/// A weather day joined with its observed interruption counts.
struct DailyRecord {
  DailyWeather weather;
  double n_sustained = 0.0;
  double m_momentary = 0.0;
};

/// Minimum record count for any fit or training call.
inline constexpr std::size_t kMinDatasetSize = 30;

/// Chronologically ordered daily records plus a description of where they
/// came from (source files, dropped-day counts).
struct Dataset {
  std::vector<DailyRecord> records;
  std::string provenance;

  [[nodiscard]] std::size_t size() const { return records.size(); }
  [[nodiscard]] bool empty() const { return records.empty(); }
};

/// Contiguous chronological slices; concatenating them in order restores the
/// original dataset.
struct SplitDataset {
  Dataset train;
  Dataset validate;
  Dataset test;
};

/// Which interruption count a model targets.
enum class Target { sustained, momentary };

[[nodiscard]] constexpr std::string_view target_name(Target t) {
  return t == Target::sustained ? "N" : "M";
}

inline constexpr int kFeatureCount = 11;

/// Canonical feature order; also the column order of the aligned-dataset CSV.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "t_max", "t_ave", "t_min", "hdd",      "cdd",      "w_pea",
    "w_ave", "w_sus", "p_rain", "pressure", "lightning"};

/// Index into kFeatureNames, or -1 when the name is unknown.
int feature_index(std::string_view name);

double feature_value(const DailyWeather& day, int index);
double& feature_ref(DailyWeather& day, int index);

inline double feature_value(const DailyRecord& record, int index) {
  return feature_value(record.weather, index);
}

double target_value(const DailyRecord& record, Target t);

}  // namespace gridcast
