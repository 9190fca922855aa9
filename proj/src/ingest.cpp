#include "gridcast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "gridcast/csv.hpp"
#include "gridcast/errors.hpp"

namespace gridcast {

namespace {

void require_header(std::string_view line, std::span<const std::string_view> expected) {
  const auto fields = csv::split_fields(line);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= fields.size() || fields[i] != expected[i]) {
      throw MissingColumn(std::string(expected[i]));
    }
  }
  if (fields.size() != expected.size()) {
    throw MissingColumn("unexpected extra column '" + std::string(fields[expected.size()]) + "'");
  }
}

double parse_value(std::string_view text, std::size_t row, const char* column) {
  const auto value = csv::parse_double(text);
  if (!value || !std::isfinite(*value)) {
    throw UnparsableValue(row, column, "'" + std::string(text) + "'");
  }
  return *value;
}

double parse_nonnegative(std::string_view text, std::size_t row, const char* column) {
  const double value = parse_value(text, row, column);
  if (value < 0.0) throw UnparsableValue(row, column, "negative value");
  return value;
}

}  // namespace

std::vector<HourlyWeatherRow> parse_weather_csv(const std::string& path) {
  static constexpr std::array<std::string_view, 6> header = {
      "timestamp", "temperature_f", "precip_in", "pressure_inhg", "wind_mph", "lightning"};

  const std::string content = csv::read_file(path);
  const auto lines = csv::split_lines(content);
  if (lines.empty()) throw EmptyFile(path);
  require_header(lines[0], header);
  if (lines.size() == 1) throw EmptyFile(path);

  std::vector<HourlyWeatherRow> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row_no = i;  // 1-based data row
    const auto fields = csv::split_fields(lines[i]);
    if (fields.size() != header.size()) {
      throw UnparsableValue(row_no, "row", "expected 6 fields, got " +
                                               std::to_string(fields.size()));
    }

    HourlyWeatherRow row;
    const std::string_view ts = fields[0];
    // "YYYY-MM-DDTHH:00"
    bool ok = ts.size() == 16 && ts[10] == 'T' && ts.substr(13) == ":00";
    if (ok) ok = Date::parse(ts.substr(0, 10), row.date);
    if (ok) {
      const auto hour = csv::parse_long(ts.substr(11, 2));
      ok = hour.has_value() && *hour >= 0 && *hour <= 23;
      if (ok) row.hour = static_cast<int>(*hour);
    }
    if (!ok) throw UnparsableValue(row_no, "timestamp", "'" + std::string(ts) + "'");

    row.temperature_f = parse_value(fields[1], row_no, "temperature_f");
    row.precip_in = parse_nonnegative(fields[2], row_no, "precip_in");
    row.pressure_inhg = parse_value(fields[3], row_no, "pressure_inhg");
    row.wind_mph = parse_nonnegative(fields[4], row_no, "wind_mph");
    const auto strikes = csv::parse_long(fields[5]);
    if (!strikes || *strikes < 0) {
      throw UnparsableValue(row_no, "lightning", "'" + std::string(fields[5]) +
                                                     "' (need a non-negative integer)");
    }
    row.lightning = *strikes;
    rows.push_back(row);
  }

  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.serial_hour() < b.serial_hour();
  });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].serial_hour() == rows[i - 1].serial_hour()) {
      throw UnparsableValue(i + 1, "timestamp",
                            "duplicate timestamp " + rows[i].date.to_string());
    }
  }
  return rows;
}

std::vector<InterruptionRow> parse_interruption_csv(const std::string& path) {
  static constexpr std::array<std::string_view, 3> header = {"date", "n_sustained",
                                                             "m_momentary"};
  const std::string content = csv::read_file(path);
  const auto lines = csv::split_lines(content);
  if (lines.empty()) throw EmptyFile(path);
  require_header(lines[0], header);
  if (lines.size() == 1) throw EmptyFile(path);

  std::vector<InterruptionRow> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = csv::split_fields(lines[i]);
    if (fields.size() != header.size()) {
      throw UnparsableValue(i, "row",
                            "expected 3 fields, got " + std::to_string(fields.size()));
    }
    InterruptionRow row;
    if (!Date::parse(fields[0], row.date)) {
      throw UnparsableValue(i, "date", "'" + std::string(fields[0]) + "'");
    }
    auto count = [&](std::string_view text, const char* column) {
      const auto value = csv::parse_long(text);
      if (!value) throw UnparsableValue(i, column, "'" + std::string(text) + "'");
      if (*value < 0) {
        throw NegativeCount(std::string(column) + " = " + std::string(text) + " on " +
                            row.date.to_string());
      }
      return *value;
    };
    row.n_sustained = count(fields[1], "n_sustained");
    row.m_momentary = count(fields[2], "m_momentary");
    rows.push_back(row);
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date) throw DuplicateDate(rows[i].date.to_string());
  }
  return rows;
}

DailyAggregate aggregate_daily(std::span<const HourlyWeatherRow> rows, double base_temp) {
  DailyAggregate result;
  if (rows.empty()) return result;

  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin + 1;
    while (end < rows.size() && rows[end].date == rows[begin].date) ++end;
    const std::span<const HourlyWeatherRow> day = rows.subspan(begin, end - begin);
    begin = end;

    if (day.size() < 18) {
      result.skipped.push_back(day.front().date);
      continue;
    }

    DailyWeather agg;
    agg.date = day.front().date;
    agg.t_max = day.front().temperature_f;
    agg.t_min = day.front().temperature_f;
    agg.w_pea = 0.0;
    double t_sum = 0.0, wind_sum = 0.0, pressure_sum = 0.0;
    long strikes = 0;
    for (const auto& hour : day) {
      agg.t_max = std::max(agg.t_max, hour.temperature_f);
      agg.t_min = std::min(agg.t_min, hour.temperature_f);
      t_sum += hour.temperature_f;
      agg.w_pea = std::max(agg.w_pea, hour.wind_mph);
      wind_sum += hour.wind_mph;
      agg.p_rain += hour.precip_in;
      pressure_sum += hour.pressure_inhg;
      strikes += hour.lightning;
    }
    const double hours = static_cast<double>(day.size());
    agg.t_ave = t_sum / hours;
    agg.w_ave = wind_sum / hours;
    agg.pressure = pressure_sum / hours;
    agg.lightning = static_cast<double>(strikes);
    agg.hdd = std::max(0.0, base_temp - agg.t_ave);
    agg.cdd = std::max(0.0, agg.t_ave - base_temp);

    // Sustained wind: peak of the 2-hour rolling mean over consecutive hours.
    // With the 18-of-24 coverage guard an adjacent pair always exists.
    agg.w_sus = 0.0;
    for (std::size_t i = 0; i + 1 < day.size(); ++i) {
      if (day[i + 1].serial_hour() != day[i].serial_hour() + 1) continue;
      agg.w_sus = std::max(agg.w_sus, 0.5 * (day[i].wind_mph + day[i + 1].wind_mph));
    }

    result.days.push_back(agg);
  }
  return result;
}

Dataset align(std::span<const DailyWeather> daily,
              std::span<const InterruptionRow> interruptions) {
  std::map<std::int64_t, const InterruptionRow*> by_date;
  for (const auto& row : interruptions) by_date.emplace(row.date.serial(), &row);

  Dataset ds;
  std::size_t weather_only = 0;
  for (const auto& day : daily) {
    const auto it = by_date.find(day.date.serial());
    if (it == by_date.end()) {
      ++weather_only;
      continue;
    }
    ds.records.push_back(DailyRecord{day, static_cast<double>(it->second->n_sustained),
                                     static_cast<double>(it->second->m_momentary)});
  }
  if (ds.records.empty()) throw EmptyIntersection();

  std::sort(ds.records.begin(), ds.records.end(), [](const auto& a, const auto& b) {
    return a.weather.date < b.weather.date;
  });
  const std::size_t interruption_only = interruptions.size() - ds.records.size();
  std::ostringstream note;
  note << "aligned " << ds.records.size() << " days; dropped " << weather_only
       << " weather-only and " << interruption_only << " interruption-only days";
  ds.provenance = note.str();
  return ds;
}

SplitDataset split_chronological(const Dataset& ds, std::array<double, 3> fractions) {
  double sum = 0.0;
  for (const double f : fractions) {
    if (f < 0.0) throw BadFractions("negative fraction");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw BadFractions("fractions sum to " + csv::format_double(sum));
  if (ds.size() < kMinDatasetSize) throw DatasetTooSmall(ds.size(), kMinDatasetSize);

  const std::size_t n = ds.size();
  const std::size_t n_train = static_cast<std::size_t>(std::floor(fractions[0] * static_cast<double>(n)));
  const std::size_t n_validate = static_cast<std::size_t>(std::floor(fractions[1] * static_cast<double>(n)));

  SplitDataset split;
  const auto& r = ds.records;
  split.train.records.assign(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.validate.records.assign(r.begin() + static_cast<std::ptrdiff_t>(n_train),
                                r.begin() + static_cast<std::ptrdiff_t>(n_train + n_validate));
  split.test.records.assign(r.begin() + static_cast<std::ptrdiff_t>(n_train + n_validate), r.end());
  split.train.provenance = ds.provenance + " [train]";
  split.validate.provenance = ds.provenance + " [validate]";
  split.test.provenance = ds.provenance + " [test]";
  return split;
}

std::string dataset_to_csv(const Dataset& ds) {
  std::string out = "date,t_max,t_ave,t_min,hdd,cdd,w_pea,w_ave,w_sus,p_rain,pressure,lightning,n,m\n";
  for (const auto& record : ds.records) {
    out += record.weather.date.to_string();
    for (int i = 0; i < kFeatureCount; ++i) {
      out += ',';
      out += csv::format_double(feature_value(record.weather, i));
    }
    out += ',';
    out += csv::format_double(record.n_sustained);
    out += ',';
    out += csv::format_double(record.m_momentary);
    out += '\n';
  }
  return out;
}

Dataset dataset_from_csv_text(std::string_view text, const std::string& origin) {
  static constexpr std::array<std::string_view, 14> header = {
      "date", "t_max", "t_ave", "t_min", "hdd",      "cdd",       "w_pea",
      "w_ave", "w_sus", "p_rain", "pressure", "lightning", "n", "m"};
  const auto lines = csv::split_lines(text);
  if (lines.empty()) throw EmptyFile(origin);
  require_header(lines[0], header);
  if (lines.size() == 1) throw EmptyFile(origin);

  Dataset ds;
  ds.provenance = origin;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = csv::split_fields(lines[i]);
    if (fields.size() != header.size()) {
      throw UnparsableValue(i, "row",
                            "expected 14 fields, got " + std::to_string(fields.size()));
    }
    DailyRecord record;
    if (!Date::parse(fields[0], record.weather.date)) {
      throw UnparsableValue(i, "date", "'" + std::string(fields[0]) + "'");
    }
    for (int f = 0; f < kFeatureCount; ++f) {
      feature_ref(record.weather, f) = parse_value(
          fields[static_cast<std::size_t>(f + 1)], i, std::string(kFeatureNames[static_cast<std::size_t>(f)]).c_str());
    }
    record.n_sustained = parse_nonnegative(fields[12], i, "n");
    record.m_momentary = parse_nonnegative(fields[13], i, "m");
    if (!ds.records.empty() && !(ds.records.back().weather.date < record.weather.date)) {
      throw DuplicateDate(record.weather.date.to_string() + " (dates must strictly increase)");
    }
    ds.records.push_back(record);
  }
  return ds;
}

Dataset read_dataset_csv(const std::string& path) {
  return dataset_from_csv_text(csv::read_file(path), path);
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  csv::atomic_write(path, dataset_to_csv(ds));
}

}  // namespace gridcast
