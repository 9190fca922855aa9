#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "gridcast/types.hpp"

namespace gridcast {

inline constexpr std::array<double, 3> kDefaultFractions = {0.60, 0.15, 0.25};
inline constexpr double kDefaultBaseTempF = 65.0;

/// Parses the hourly weather CSV
/// (`timestamp,temperature_f,precip_in,pressure_inhg,wind_mph,lightning`,
/// timestamp `YYYY-MM-DDTHH:00`). Rows are returned sorted by timestamp.
/// Throws MissingColumn, UnparsableValue (with row/column), EmptyFile.
std::vector<HourlyWeatherRow> parse_weather_csv(const std::string& path);

/// Parses the daily interruption CSV (`date,n_sustained,m_momentary`).
/// Throws DuplicateDate, NegativeCount, UnparsableValue, EmptyFile.
std::vector<InterruptionRow> parse_interruption_csv(const std::string& path);

struct DailyAggregate {
  std::vector<DailyWeather> days;
  std::vector<Date> skipped;  // days dropped by the coverage guard
};

/// Collapses hourly rows into the daily features. A day needs at least 18 of
/// 24 hours present; thinner days land on the skip list instead of failing.
/// hdd/cdd use `base_temp`; w_sus is the largest 2-hour rolling mean of wind.
DailyAggregate aggregate_daily(std::span<const HourlyWeatherRow> rows,
                               double base_temp = kDefaultBaseTempF);

/// Inner join of weather days and interruption rows on date. Days present in
/// only one source are dropped and counted in the provenance string.
/// Throws EmptyIntersection when no date is shared.
Dataset align(std::span<const DailyWeather> daily, std::span<const InterruptionRow> interruptions);

/// Contiguous chronological slices of sizes floor(f0*n), floor(f1*n), rest.
/// Throws BadFractions (sum != 1 within 1e-9 or a negative entry) and
/// DatasetTooSmall (< 30 records).
SplitDataset split_chronological(const Dataset& ds,
                                 std::array<double, 3> fractions = kDefaultFractions);

/// Aligned-dataset CSV
/// (`date,t_max,t_ave,t_min,hdd,cdd,w_pea,w_ave,w_sus,p_rain,pressure,lightning,n,m`).
/// Doubles are written in shortest round-trip form, so write-then-read is
/// bit-identical.
std::string dataset_to_csv(const Dataset& ds);
Dataset dataset_from_csv_text(std::string_view text, const std::string& origin);
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace gridcast
