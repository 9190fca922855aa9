#include <CLI11.hpp>
#include <array>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "gridcast/csv.hpp"
#include "gridcast/errors.hpp"
#include "gridcast/ingest.hpp"
#include "gridcast/pipeline.hpp"
#include "gridcast/sensitivity.hpp"
#include "gridcast/serialize.hpp"
#include "gridcast/synth.hpp"

namespace {

namespace fs = std::filesystem;
using gridcast::Json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitAllFitsFailed = 3;
constexpr int kExitTrainingFailed = 4;

struct Options {
  std::string config_path;
  std::string weather;
  std::string interruptions;
  std::string dataset;
  std::string model;
  std::string spec_path;
  std::string out;
  std::uint64_t seed = 1;
  double delta = 1.0;
  int restarts = 10;
  int hidden = gridcast::kDefaultHiddenCount;
  double base_temp = gridcast::kDefaultBaseTempF;
  std::string split_text = "0.6,0.15,0.25";
  std::string target = "both";
  std::string eval_split = "test";
  int days = 0;  // 0: keep the synthetic spec's own day count
  bool planted = false;
};

std::array<double, 3> parse_split(const std::string& text) {
  const auto fields = gridcast::csv::split_fields(text);
  if (fields.size() != 3) throw gridcast::BadFractions("expected three comma-separated values");
  std::array<double, 3> fractions{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto value = gridcast::csv::parse_double(fields[i]);
    if (!value) throw gridcast::BadFractions("'" + std::string(fields[i]) + "'");
    fractions[i] = *value;
  }
  return fractions;
}

gridcast::ElmConfig elm_config(const Options& opt) {
  gridcast::ElmConfig cfg;
  cfg.delta = opt.delta;
  cfg.seed = opt.seed;
  cfg.restarts = opt.restarts;
  cfg.hidden_count = opt.hidden;
  gridcast::validate(cfg);
  return cfg;
}

fs::path ensure_out_dir(const Options& opt) {
  if (opt.out.empty()) throw gridcast::ConfigError("--out directory is required");
  fs::path dir(opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw gridcast::IoError("cannot create output directory " + dir.string());
  }
  return dir;
}

/// Values from --config fill any option the user did not pass on the command
/// line; command-line flags win.
void apply_config_file(const CLI::App& cmd, Options& opt) {
  if (opt.config_path.empty()) return;
  const Json j = gridcast::load_json(opt.config_path);
  auto fill = [&](const char* flag, auto& slot) {
    const CLI::Option* option = cmd.get_option_no_throw(flag);
    const std::string key = std::string(flag).substr(2);
    if (!j.contains(key)) return;
    if (option != nullptr && option->count() > 0) return;  // flag wins
    using T = std::decay_t<decltype(slot)>;
    slot = j.at(key).get<T>();
  };
  fill("--weather", opt.weather);
  fill("--interruptions", opt.interruptions);
  fill("--dataset", opt.dataset);
  fill("--model", opt.model);
  fill("--spec", opt.spec_path);
  fill("--out", opt.out);
  fill("--seed", opt.seed);
  fill("--delta", opt.delta);
  fill("--restarts", opt.restarts);
  fill("--hidden", opt.hidden);
  fill("--base-temp", opt.base_temp);
  fill("--split", opt.split_text);
  fill("--target", opt.target);
  fill("--eval-split", opt.eval_split);
  fill("--days", opt.days);
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file; flags override its keys");
  cmd->add_option("--out", opt.out, "output directory");
}

int cmd_synth(const Options& opt) {
  gridcast::SyntheticSpec spec =
      opt.planted ? gridcast::planted_lightning_spec(opt.seed) : gridcast::default_spec(opt.seed);
  if (!opt.spec_path.empty()) {
    spec = gridcast::synthetic_spec_from_json(gridcast::load_json(opt.spec_path));
  } else {
    spec.seed = opt.seed;
    if (opt.days > 0) spec.days = opt.days;
    spec.base_temp_f = opt.base_temp;
  }

  const gridcast::SyntheticData data = gridcast::generate(spec);
  const fs::path dir = ensure_out_dir(opt);

  std::string weather = "timestamp,temperature_f,precip_in,pressure_inhg,wind_mph,lightning\n";
  char stamp[32];
  for (const auto& row : data.hourly) {
    std::snprintf(stamp, sizeof(stamp), "%sT%02d:00", row.date.to_string().c_str(), row.hour);
    weather += stamp;
    weather += ',';
    weather += gridcast::csv::format_double(row.temperature_f);
    weather += ',';
    weather += gridcast::csv::format_double(row.precip_in);
    weather += ',';
    weather += gridcast::csv::format_double(row.pressure_inhg);
    weather += ',';
    weather += gridcast::csv::format_double(row.wind_mph);
    weather += ',';
    weather += std::to_string(row.lightning);
    weather += '\n';
  }
  gridcast::csv::atomic_write((dir / "weather.csv").string(), weather);

  std::string interruptions = "date,n_sustained,m_momentary\n";
  for (const auto& row : data.interruptions) {
    interruptions += row.date.to_string() + ',' + std::to_string(row.n_sustained) + ',' +
                     std::to_string(row.m_momentary) + '\n';
  }
  gridcast::csv::atomic_write((dir / "interruptions.csv").string(), interruptions);

  gridcast::write_dataset_csv(data.dataset, (dir / "dataset.csv").string());
  gridcast::save_json(gridcast::ground_truth_to_json(data.truth),
                      (dir / "ground_truth.json").string());

  std::cout << "synth: wrote " << data.dataset.size() << " days to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_ingest(const Options& opt) {
  if (opt.weather.empty() || opt.interruptions.empty()) {
    throw gridcast::ConfigError("--weather and --interruptions are required");
  }
  const auto hourly = gridcast::parse_weather_csv(opt.weather);
  const auto interruptions = gridcast::parse_interruption_csv(opt.interruptions);
  const auto aggregate = gridcast::aggregate_daily(hourly, opt.base_temp);
  gridcast::Dataset ds = gridcast::align(aggregate.days, interruptions);
  ds.provenance += "; skipped " + std::to_string(aggregate.skipped.size()) +
                   " low-coverage days; sources: " + opt.weather + ", " + opt.interruptions;

  const fs::path dir = ensure_out_dir(opt);
  gridcast::write_dataset_csv(ds, (dir / "dataset.csv").string());
  std::cout << "ingest: " << ds.provenance << "\n";
  for (const auto& date : aggregate.skipped) {
    std::cerr << "ingest: skipped low-coverage day " << date.to_string() << "\n";
  }
  return kExitOk;
}

int cmd_fit(const Options& opt) {
  if (opt.dataset.empty()) throw gridcast::ConfigError("--dataset is required");
  const gridcast::Dataset ds = gridcast::read_dataset_csv(opt.dataset);
  const fs::path dir = ensure_out_dir(opt);

  const bool want_n = opt.target == "both" || opt.target == "n";
  const bool want_m = opt.target == "both" || opt.target == "m";
  if (!want_n && !want_m) throw gridcast::ConfigError("--target must be n, m, or both");

  bool any_entry = false;
  auto emit = [&](gridcast::Target target, const char* suffix) {
    const gridcast::ModelCatalog catalog = gridcast::fit_catalog(ds, target);
    for (const auto& dropped : catalog.dropped) {
      std::cerr << "fit[" << gridcast::target_name(target) << "]: dropped feature "
                << dropped.feature << " (" << dropped.reason << ")\n";
    }
    any_entry = any_entry || !catalog.entries.empty();
    gridcast::save_json(gridcast::catalog_to_json(catalog),
                        (dir / (std::string("catalog_") + suffix + ".json")).string());
    gridcast::csv::atomic_write((dir / (std::string("fit_table_") + suffix + ".csv")).string(),
                                gridcast::fit_table_to_csv(catalog));
  };
  if (want_n) emit(gridcast::Target::sustained, "n");
  if (want_m) emit(gridcast::Target::momentary, "m");

  if (!any_entry) {
    std::cerr << "fit: every feature failed\n";
    return kExitAllFitsFailed;
  }
  std::cout << "fit: catalogs written to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_train(const Options& opt) {
  if (opt.dataset.empty()) throw gridcast::ConfigError("--dataset is required");
  const gridcast::Dataset ds = gridcast::read_dataset_csv(opt.dataset);
  const auto fractions = parse_split(opt.split_text);
  const gridcast::ElmConfig cfg = elm_config(opt);
  const fs::path dir = ensure_out_dir(opt);

  gridcast::TrainReport report;
  try {
    report = gridcast::run_training(ds, fractions, cfg);
  } catch (const gridcast::SingularSystem& e) {
    std::cerr << "train: " << e.what() << "\n";
    return kExitTrainingFailed;
  } catch (const gridcast::NonConvergence& e) {
    std::cerr << "train: " << e.what() << "\n";
    return kExitTrainingFailed;
  }

  gridcast::save_json(gridcast::model_to_json(report.forecaster, cfg),
                      (dir / "model.json").string());
  gridcast::save_json(gridcast::train_metrics_to_json(report), (dir / "metrics.json").string());

  const gridcast::Matrix hybrid = gridcast::hybrid_predictions(report.forecaster, ds);
  const gridcast::Matrix baseline = gridcast::baseline_predictions(
      report.catalog_n, report.catalog_m, report.train_means, ds);
  gridcast::csv::atomic_write((dir / "predictions.csv").string(),
                              gridcast::predictions_to_csv(ds, hybrid, baseline));

  std::cout << "train: hybrid test MSE (N, M) = (" << report.hybrid_test_mse[0] << ", "
            << report.hybrid_test_mse[1] << "); baseline (" << report.baseline_test_mse[0] << ", "
            << report.baseline_test_mse[1] << "); reduction% (" << report.reduction_pct[0] << ", "
            << report.reduction_pct[1] << ")\n";
  return kExitOk;
}

int cmd_forecast(const Options& opt) {
  if (opt.model.empty() || opt.dataset.empty()) {
    throw gridcast::ConfigError("--model and --dataset are required");
  }
  const auto [forecaster, cfg] = gridcast::model_from_json(gridcast::load_json(opt.model));
  (void)cfg;
  const gridcast::Dataset ds = gridcast::read_dataset_csv(opt.dataset);
  const fs::path dir = ensure_out_dir(opt);

  const gridcast::Matrix hybrid = gridcast::hybrid_predictions(forecaster, ds);
  gridcast::csv::atomic_write((dir / "forecast.csv").string(),
                              gridcast::forecast_to_csv(ds, hybrid));

  const Eigen::Vector2d err = gridcast::mse(hybrid, gridcast::target_matrix(ds));
  Json summary{{"rows", ds.size()}, {"mse", Json::array({err[0], err[1]})}};
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int cmd_sensitivity(const Options& opt) {
  if (opt.model.empty() || opt.dataset.empty()) {
    throw gridcast::ConfigError("--model and --dataset are required");
  }
  const auto [forecaster, cfg] = gridcast::model_from_json(gridcast::load_json(opt.model));
  (void)cfg;
  gridcast::Dataset ds = gridcast::read_dataset_csv(opt.dataset);

  if (opt.eval_split != "all") {
    gridcast::SplitDataset split = gridcast::split_chronological(ds, parse_split(opt.split_text));
    if (opt.eval_split == "train") {
      ds = std::move(split.train);
    } else if (opt.eval_split == "validate") {
      ds = std::move(split.validate);
    } else if (opt.eval_split == "test") {
      ds = std::move(split.test);
    } else {
      throw gridcast::ConfigError("--eval-split must be train, validate, test, or all");
    }
  }

  const gridcast::SensitivityReport report = gridcast::aggregate(forecaster, ds);
  const fs::path dir = ensure_out_dir(opt);
  gridcast::save_json(gridcast::sensitivity_to_json(report), (dir / "sensitivity.json").string());
  gridcast::csv::atomic_write((dir / "sensitivity.csv").string(),
                              gridcast::sensitivity_to_csv(report));
  std::cout << "sensitivity: top parameter for N is " << report.ranked[0].front()
            << ", for M is " << report.ranked[1].front() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridcast: weather-driven daily power-interruption forecasting"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset with ground truth");
  add_common(synth, opt);
  synth->add_option("--spec", opt.spec_path, "synthetic spec JSON (overrides other knobs)");
  synth->add_option("--seed", opt.seed, "RNG seed");
  synth->add_option("--days", opt.days, "number of days (default: the spec's own count)");
  synth->add_option("--base-temp", opt.base_temp, "degree-day base temperature (F)");
  synth->add_flag("--planted", opt.planted, "use the lightning-dominant spec");

  CLI::App* ingest = app.add_subcommand("ingest", "aggregate and align weather + interruptions");
  add_common(ingest, opt);
  ingest->add_option("--weather", opt.weather, "hourly weather CSV");
  ingest->add_option("--interruptions", opt.interruptions, "daily interruption CSV");
  ingest->add_option("--base-temp", opt.base_temp, "degree-day base temperature (F)");

  CLI::App* fit = app.add_subcommand("fit", "fit per-feature regressions and pick winners");
  add_common(fit, opt);
  fit->add_option("--dataset", opt.dataset, "aligned dataset CSV");
  fit->add_option("--target", opt.target, "n, m, or both");

  CLI::App* train = app.add_subcommand("train", "train the hybrid MLP and score the baseline");
  add_common(train, opt);
  train->add_option("--dataset", opt.dataset, "aligned dataset CSV");
  train->add_option("--seed", opt.seed, "RNG seed");
  train->add_option("--delta", opt.delta, "lambda exponent in [1,2]");
  train->add_option("--restarts", opt.restarts, "hidden-layer restarts");
  train->add_option("--hidden", opt.hidden, "hidden neuron count");
  train->add_option("--split", opt.split_text, "train,validate,test fractions");

  CLI::App* forecast = app.add_subcommand("forecast", "forecast counts with a trained model");
  add_common(forecast, opt);
  forecast->add_option("--model", opt.model, "model JSON");
  forecast->add_option("--dataset", opt.dataset, "aligned dataset CSV");

  CLI::App* sensitivity = app.add_subcommand("sensitivity", "rank weather parameters");
  add_common(sensitivity, opt);
  sensitivity->add_option("--model", opt.model, "model JSON");
  sensitivity->add_option("--dataset", opt.dataset, "aligned dataset CSV");
  sensitivity->add_option("--eval-split", opt.eval_split, "train, validate, test, or all");
  sensitivity->add_option("--split", opt.split_text, "train,validate,test fractions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    apply_config_file(*cmd, opt);
    if (cmd == synth) return cmd_synth(opt);
    if (cmd == ingest) return cmd_ingest(opt);
    if (cmd == fit) return cmd_fit(opt);
    if (cmd == train) return cmd_train(opt);
    if (cmd == forecast) return cmd_forecast(opt);
    if (cmd == sensitivity) return cmd_sensitivity(opt);
  } catch (const gridcast::Error& e) {
    std::cerr << cmd->get_name() << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const Json::exception& e) {
    std::cerr << cmd->get_name() << ": " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
