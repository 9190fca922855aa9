#include "gridcast/serialize.hpp"

#include <algorithm>
#include <cmath>

#include "gridcast/csv.hpp"
#include "gridcast/errors.hpp"

namespace gridcast {

namespace {

Json vector_to_json(ConstVectorRef v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector out(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& value : j) out[i++] = value.get<double>();
  return out;
}

Json matrix_to_json(ConstMatrixRef m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    out.row(r) = vector_from_json(j[static_cast<std::size_t>(r)]).transpose();
  }
  return out;
}

Json model_to_json_obj(const RegressionModel& model) {
  Json j{{"kind", std::string(model_kind_name(model.kind))},
         {"beta", vector_to_json(model.beta)},
         {"input_name", model.input_name}};
  if (model.kind == ModelKind::polynomial) j["degree"] = model.degree;
  return j;
}

RegressionModel model_from_json_obj(const Json& j) {
  RegressionModel model;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "polynomial") {
    model.kind = ModelKind::polynomial;
    model.degree = j.at("degree").get<int>();
  } else if (kind == "two_term_exponential") {
    model.kind = ModelKind::two_term_exponential;
    model.degree = 0;
  } else {
    throw ConfigError("unknown model kind '" + kind + "'");
  }
  model.beta = vector_from_json(j.at("beta"));
  if (j.contains("input_name")) model.input_name = j.at("input_name").get<std::string>();
  if (model.kind == ModelKind::polynomial &&
      model.beta.size() != model.degree + 1) {
    throw ConfigError("polynomial beta length does not match degree");
  }
  if (model.kind == ModelKind::two_term_exponential && model.beta.size() != 5) {
    throw ConfigError("two-term exponential needs 5 coefficients");
  }
  return model;
}

Json optional_to_json(const std::optional<double>& value) {
  if (value) return *value;
  return nullptr;
}

}  // namespace

Json catalog_to_json(const ModelCatalog& catalog) {
  Json out = Json::array();
  for (const auto& entry : catalog.entries) {
    Json candidates = Json::array();
    for (const auto& scored : entry.candidates) {
      Json c = model_to_json_obj(scored.model);
      c.erase("input_name");  // the entry's feature field carries the name
      c["sse"] = scored.report.sse;
      c["r2"] = optional_to_json(scored.report.r_square);
      c["adj_r2"] = optional_to_json(scored.report.adj_r_square);
      c["rmse"] = scored.report.rmse;
      c["dof"] = scored.report.dof;
      candidates.push_back(std::move(c));
    }
    out.push_back(Json{{"feature", entry.feature},
                       {"candidates", std::move(candidates)},
                       {"winner", entry.winner}});
  }
  return out;
}

ModelCatalog catalog_from_json(const Json& j, Target target) {
  ModelCatalog catalog;
  catalog.target = target;
  for (const auto& entry_json : j) {
    CatalogEntry entry;
    entry.feature = entry_json.at("feature").get<std::string>();
    for (const auto& c : entry_json.at("candidates")) {
      ScoredModel scored;
      scored.model = model_from_json_obj(c);
      scored.model.input_name = entry.feature;
      scored.report.sse = c.at("sse").get<double>();
      if (!c.at("r2").is_null()) scored.report.r_square = c.at("r2").get<double>();
      if (!c.at("adj_r2").is_null()) scored.report.adj_r_square = c.at("adj_r2").get<double>();
      scored.report.rmse = c.at("rmse").get<double>();
      scored.report.dof = c.at("dof").get<Eigen::Index>();
      entry.candidates.push_back(std::move(scored));
    }
    entry.winner = entry_json.at("winner").get<std::size_t>();
    if (entry.winner >= entry.candidates.size()) {
      throw ConfigError("catalog winner index out of range for " + entry.feature);
    }
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

namespace {

Json feature_spec_to_json(const FeatureSpec& spec) {
  Json n_models = Json::array();
  for (const auto& model : spec.n_models) n_models.push_back(model_to_json_obj(model));
  Json m_models = Json::array();
  for (const auto& model : spec.m_models) m_models.push_back(model_to_json_obj(model));
  Json constant = Json::array();
  for (const bool flag : spec.normalization.constant) constant.push_back(flag);
  return Json{{"raw_features", spec.raw_features},
              {"n_models", std::move(n_models)},
              {"m_models", std::move(m_models)},
              {"normalization",
               Json{{"shift", vector_to_json(spec.normalization.shift)},
                    {"scale", vector_to_json(spec.normalization.scale)},
                    {"constant", std::move(constant)}}}};
}

FeatureSpec feature_spec_from_json(const Json& j) {
  FeatureSpec spec;
  spec.raw_features = j.at("raw_features").get<std::vector<std::string>>();
  for (const auto& m : j.at("n_models")) spec.n_models.push_back(model_from_json_obj(m));
  for (const auto& m : j.at("m_models")) spec.m_models.push_back(model_from_json_obj(m));
  spec.normalization.shift = vector_from_json(j.at("normalization").at("shift"));
  spec.normalization.scale = vector_from_json(j.at("normalization").at("scale"));
  spec.normalization.constant.assign(static_cast<std::size_t>(spec.input_dim()), false);
  if (j.at("normalization").contains("constant")) {
    const auto& flags = j.at("normalization").at("constant");
    for (std::size_t c = 0; c < flags.size() && c < spec.normalization.constant.size(); ++c) {
      spec.normalization.constant[c] = flags[c].get<bool>();
    }
  }
  if (spec.normalization.shift.size() != spec.input_dim() ||
      spec.normalization.scale.size() != spec.input_dim()) {
    throw ConfigError("normalization length does not match input_dim");
  }
  return spec;
}

Json vector2_to_json(const Eigen::Vector2d& v) { return Json::array({v[0], v[1]}); }

Eigen::Vector2d vector2_from_json(const Json& j) {
  return Eigen::Vector2d(j.at(0).get<double>(), j.at(1).get<double>());
}

}  // namespace

Json model_to_json(const TrainedForecaster& forecaster, const ElmConfig& cfg) {
  Json restarts = Json::array();
  for (const auto& stats : forecaster.restart_trace) {
    restarts.push_back(Json{{"train_mse", vector2_to_json(stats.train_mse)},
                            {"validate_mse", vector2_to_json(stats.validate_mse)}});
  }
  Json metrics{{"train_mse", vector2_to_json(forecaster.train_mse)},
               {"validate_mse", vector2_to_json(forecaster.validate_mse)},
               {"test_mse", forecaster.test_mse ? vector2_to_json(*forecaster.test_mse) : Json()},
               {"lambda", forecaster.lambda},
               {"chosen_restart", forecaster.chosen_restart},
               {"restart_trace", std::move(restarts)}};
  Json config{{"delta", cfg.delta},          {"delta1", cfg.delta1},
              {"delta2", cfg.delta2},        {"seed", cfg.seed},
              {"restarts", cfg.restarts},    {"hidden", cfg.hidden_count}};
  if (cfg.lambda_override) config["lambda_override"] = *cfg.lambda_override;

  return Json{{"version", std::string(kModelFileVersion)},
              {"feature_spec", feature_spec_to_json(forecaster.feature_spec)},
              {"w", matrix_to_json(forecaster.network.w)},
              {"b_hidden", vector_to_json(forecaster.network.b_hidden)},
              {"v", matrix_to_json(forecaster.network.v)},
              {"b_out", vector_to_json(forecaster.network.b_out)},
              {"g", std::string(activation_name(forecaster.network.g_activation))},
              {"f", std::string(activation_name(forecaster.network.f_activation))},
              {"config", std::move(config)},
              {"metrics", std::move(metrics)}};
}

std::pair<TrainedForecaster, ElmConfig> model_from_json(const Json& j) {
  if (j.at("version").get<std::string>() != kModelFileVersion) {
    throw ConfigError("unsupported model file version");
  }
  TrainedForecaster forecaster;
  forecaster.feature_spec = feature_spec_from_json(j.at("feature_spec"));
  forecaster.network.w = matrix_from_json(j.at("w"));
  forecaster.network.b_hidden = vector_from_json(j.at("b_hidden"));
  forecaster.network.v = matrix_from_json(j.at("v"));
  forecaster.network.b_out = vector_from_json(j.at("b_out"));
  const auto g = activation_from_name(j.at("g").get<std::string>());
  const auto f = activation_from_name(j.at("f").get<std::string>());
  if (!g || *g != Activation::sigmoid || !f || *f != Activation::identity) {
    throw ConfigError("model file must use g=sigmoid, f=identity");
  }
  const auto& metrics = j.at("metrics");
  forecaster.train_mse = vector2_from_json(metrics.at("train_mse"));
  forecaster.validate_mse = vector2_from_json(metrics.at("validate_mse"));
  if (!metrics.at("test_mse").is_null()) {
    forecaster.test_mse = vector2_from_json(metrics.at("test_mse"));
  }
  forecaster.lambda = metrics.at("lambda").get<double>();
  forecaster.chosen_restart = metrics.at("chosen_restart").get<int>();
  for (const auto& stats : metrics.at("restart_trace")) {
    forecaster.restart_trace.push_back(RestartStats{
        vector2_from_json(stats.at("train_mse")), vector2_from_json(stats.at("validate_mse"))});
  }

  ElmConfig cfg;
  const auto& config = j.at("config");
  cfg.delta = config.at("delta").get<double>();
  cfg.delta1 = config.at("delta1").get<double>();
  cfg.delta2 = config.at("delta2").get<double>();
  cfg.seed = config.at("seed").get<std::uint64_t>();
  cfg.restarts = config.at("restarts").get<int>();
  cfg.hidden_count = config.at("hidden").get<int>();
  if (config.contains("lambda_override")) {
    cfg.lambda_override = config.at("lambda_override").get<double>();
  }

  if (forecaster.network.w.rows() != forecaster.network.b_hidden.size() ||
      forecaster.network.v.rows() != forecaster.network.w.rows() ||
      forecaster.network.v.cols() != kOutputCount ||
      forecaster.network.w.cols() != forecaster.feature_spec.input_dim()) {
    throw ConfigError("model file weight shapes are inconsistent");
  }
  return {std::move(forecaster), cfg};
}

Json sensitivity_to_json(const SensitivityReport& report) {
  Json out = Json::array();
  for (Eigen::Index o = 0; o < report.scores.cols(); ++o) {
    Json scores = Json::array();
    for (std::size_t p = 0; p < report.parameters.size(); ++p) {
      scores.push_back(Json{{"parameter", report.parameters[p]},
                            {"score", report.scores(static_cast<Eigen::Index>(p), o)}});
    }
    out.push_back(Json{{"output", o == 0 ? "N" : "M"},
                       {"scores", std::move(scores)},
                       {"ranked", report.ranked[static_cast<std::size_t>(o)]}});
  }
  return out;
}

std::string sensitivity_to_csv(const SensitivityReport& report) {
  std::string out = "parameter,score_n,score_m\n";
  for (std::size_t p = 0; p < report.parameters.size(); ++p) {
    const auto row = static_cast<Eigen::Index>(p);
    out += report.parameters[p];
    out += ',';
    out += csv::format_double(report.scores(row, 0));
    out += ',';
    out += csv::format_double(report.scores(row, 1));
    out += '\n';
  }
  return out;
}

Json ground_truth_to_json(const GroundTruth& truth) {
  Json n = Json::array();
  for (const auto& r : truth.responses_n) n.push_back(model_to_json_obj(r.model));
  Json m = Json::array();
  for (const auto& r : truth.responses_m) m.push_back(model_to_json_obj(r.model));
  return Json{{"seed", truth.seed},
              {"noise_delta", truth.noise_delta},
              {"interaction_rain_lightning", truth.interaction_rain_lightning},
              {"responses_n", std::move(n)},
              {"responses_m", std::move(m)}};
}

Json synthetic_spec_to_json(const SyntheticSpec& spec) {
  Json n = Json::array();
  for (const auto& r : spec.responses_n) n.push_back(model_to_json_obj(r.model));
  Json m = Json::array();
  for (const auto& r : spec.responses_m) m.push_back(model_to_json_obj(r.model));
  const Marginals& mg = spec.marginals;
  return Json{{"days", spec.days},
              {"seed", spec.seed},
              {"start_date", spec.start_date.to_string()},
              {"base_temp", spec.base_temp_f},
              {"noise_delta", spec.noise_delta},
              {"interaction_rain_lightning", spec.interaction_rain_lightning},
              {"responses_n", std::move(n)},
              {"responses_m", std::move(m)},
              {"marginals",
               Json{{"temp_annual_mean_f", mg.temp_annual_mean_f},
                    {"temp_seasonal_amp_f", mg.temp_seasonal_amp_f},
                    {"temp_diurnal_amp_f", mg.temp_diurnal_amp_f},
                    {"temp_noise_sd_f", mg.temp_noise_sd_f},
                    {"pressure_base_inhg", mg.pressure_base_inhg},
                    {"pressure_step_sd", mg.pressure_step_sd},
                    {"pressure_reversion", mg.pressure_reversion},
                    {"pressure_min", mg.pressure_min},
                    {"pressure_max", mg.pressure_max},
                    {"wind_mean_mph", mg.wind_mean_mph},
                    {"wind_reversion", mg.wind_reversion},
                    {"wind_step_sd", mg.wind_step_sd},
                    {"wind_max_mph", mg.wind_max_mph},
                    {"gust_max_mph", mg.gust_max_mph},
                    {"rain_base_prob", mg.rain_base_prob},
                    {"rain_summer_prob", mg.rain_summer_prob},
                    {"rain_mean_in", mg.rain_mean_in},
                    {"rain_summer_mean_in", mg.rain_summer_mean_in},
                    {"lightning_rate", mg.lightning_rate},
                    {"lightning_storm_coupling", mg.lightning_storm_coupling}}}};
}

SyntheticSpec synthetic_spec_from_json(const Json& j) {
  SyntheticSpec spec;
  const Json defaults = synthetic_spec_to_json(spec);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("unknown synthetic spec key '" + key + "'");
    (void)value;
  }
  spec.days = j.value("days", spec.days);
  spec.seed = j.value("seed", spec.seed);
  if (j.contains("start_date") &&
      !Date::parse(j.at("start_date").get<std::string>(), spec.start_date)) {
    throw ConfigError("bad start_date");
  }
  spec.base_temp_f = j.value("base_temp", spec.base_temp_f);
  spec.noise_delta = j.value("noise_delta", spec.noise_delta);
  spec.interaction_rain_lightning =
      j.value("interaction_rain_lightning", spec.interaction_rain_lightning);
  if (j.contains("responses_n")) {
    for (const auto& m : j.at("responses_n")) {
      spec.responses_n.push_back(ResponseSpec{model_from_json_obj(m)});
    }
  }
  if (j.contains("responses_m")) {
    for (const auto& m : j.at("responses_m")) {
      spec.responses_m.push_back(ResponseSpec{model_from_json_obj(m)});
    }
  }
  if (j.contains("marginals")) {
    const auto& mj = j.at("marginals");
    Marginals& mg = spec.marginals;
    mg.temp_annual_mean_f = mj.value("temp_annual_mean_f", mg.temp_annual_mean_f);
    mg.temp_seasonal_amp_f = mj.value("temp_seasonal_amp_f", mg.temp_seasonal_amp_f);
    mg.temp_diurnal_amp_f = mj.value("temp_diurnal_amp_f", mg.temp_diurnal_amp_f);
    mg.temp_noise_sd_f = mj.value("temp_noise_sd_f", mg.temp_noise_sd_f);
    mg.pressure_base_inhg = mj.value("pressure_base_inhg", mg.pressure_base_inhg);
    mg.pressure_step_sd = mj.value("pressure_step_sd", mg.pressure_step_sd);
    mg.pressure_reversion = mj.value("pressure_reversion", mg.pressure_reversion);
    mg.pressure_min = mj.value("pressure_min", mg.pressure_min);
    mg.pressure_max = mj.value("pressure_max", mg.pressure_max);
    mg.wind_mean_mph = mj.value("wind_mean_mph", mg.wind_mean_mph);
    mg.wind_reversion = mj.value("wind_reversion", mg.wind_reversion);
    mg.wind_step_sd = mj.value("wind_step_sd", mg.wind_step_sd);
    mg.wind_max_mph = mj.value("wind_max_mph", mg.wind_max_mph);
    mg.gust_max_mph = mj.value("gust_max_mph", mg.gust_max_mph);
    mg.rain_base_prob = mj.value("rain_base_prob", mg.rain_base_prob);
    mg.rain_summer_prob = mj.value("rain_summer_prob", mg.rain_summer_prob);
    mg.rain_mean_in = mj.value("rain_mean_in", mg.rain_mean_in);
    mg.rain_summer_mean_in = mj.value("rain_summer_mean_in", mg.rain_summer_mean_in);
    mg.lightning_rate = mj.value("lightning_rate", mg.lightning_rate);
    mg.lightning_storm_coupling =
        mj.value("lightning_storm_coupling", mg.lightning_storm_coupling);
  }
  return spec;
}

std::string fit_table_to_csv(const ModelCatalog& catalog) {
  std::string out = "feature,kind,degree,sse,r_square,adj_r_square,rmse,dof,winner\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
  };
  for (const auto& entry : catalog.entries) {
    for (std::size_t i = 0; i < entry.candidates.size(); ++i) {
      const auto& scored = entry.candidates[i];
      out += entry.feature;
      out += ',';
      out += model_kind_name(scored.model.kind);
      out += ',';
      if (scored.model.kind == ModelKind::polynomial) out += std::to_string(scored.model.degree);
      out += ',';
      out += csv::format_double(scored.report.sse);
      out += ',';
      out += cell(scored.report.r_square);
      out += ',';
      out += cell(scored.report.adj_r_square);
      out += ',';
      out += csv::format_double(scored.report.rmse);
      out += ',';
      out += std::to_string(scored.report.dof);
      out += ',';
      out += i == entry.winner ? "1" : "0";
      out += '\n';
    }
  }
  return out;
}

std::string predictions_to_csv(const Dataset& ds, const Matrix& hybrid, const Matrix& baseline) {
  std::string out = "date,actual_n,hybrid_n,baseline_n,actual_m,hybrid_m,baseline_m\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out += ds.records[i].weather.date.to_string();
    out += ',';
    out += csv::format_double(ds.records[i].n_sustained);
    out += ',';
    out += csv::format_double(hybrid(row, 0));
    out += ',';
    out += csv::format_double(baseline(row, 0));
    out += ',';
    out += csv::format_double(ds.records[i].m_momentary);
    out += ',';
    out += csv::format_double(hybrid(row, 1));
    out += ',';
    out += csv::format_double(baseline(row, 1));
    out += '\n';
  }
  return out;
}

std::string forecast_to_csv(const Dataset& ds, const Matrix& hybrid) {
  std::string out = "date,n_hat,m_hat\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out += ds.records[i].weather.date.to_string();
    out += ',';
    out += csv::format_double(std::max(0.0, hybrid(row, 0)));
    out += ',';
    out += csv::format_double(std::max(0.0, hybrid(row, 1)));
    out += '\n';
  }
  return out;
}

Json train_metrics_to_json(const TrainReport& report) {
  Json restarts = Json::array();
  for (const auto& stats : report.forecaster.restart_trace) {
    restarts.push_back(Json{{"train_mse", vector2_to_json(stats.train_mse)},
                            {"validate_mse", vector2_to_json(stats.validate_mse)}});
  }
  return Json{
      {"hybrid",
       Json{{"train_mse", vector2_to_json(report.hybrid_train_mse)},
            {"validate_mse", vector2_to_json(report.hybrid_validate_mse)},
            {"test_mse", vector2_to_json(report.hybrid_test_mse)}}},
      {"baseline",
       Json{{"train_mse", vector2_to_json(report.baseline_train_mse)},
            {"validate_mse", vector2_to_json(report.baseline_validate_mse)},
            {"test_mse", vector2_to_json(report.baseline_test_mse)},
            {"definition", "sum of per-feature winners minus (features-1) * train mean"}}},
      {"reduction_pct", vector2_to_json(report.reduction_pct)},
      {"lambda", report.forecaster.lambda},
      {"chosen_restart", report.forecaster.chosen_restart},
      {"restart_trace", std::move(restarts)},
      {"split",
       Json{{"train", report.split.train.size()},
            {"validate", report.split.validate.size()},
            {"test", report.split.test.size()}}}};
}

Json load_json(const std::string& path) {
  try {
    return Json::parse(csv::read_file(path));
  } catch (const Json::parse_error& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
}

void save_json(const Json& j, const std::string& path) {
  csv::atomic_write(path, j.dump(2) + "\n");
}

}  // namespace gridcast
