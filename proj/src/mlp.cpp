#include "gridcast/mlp.hpp"

#include <cmath>
#include <limits>

#include "gridcast/errors.hpp"
#include "gridcast/rng.hpp"

namespace gridcast {

std::string_view activation_name(Activation a) {
  return a == Activation::sigmoid ? "sigmoid" : "identity";
}

std::optional<Activation> activation_from_name(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "identity") return Activation::identity;
  return std::nullopt;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

FeatureSpec make_feature_spec(const Dataset& train, const ModelCatalog& n_catalog,
                              const ModelCatalog& m_catalog) {
  FeatureSpec spec;
  spec.raw_features.assign(kFeatureNames.begin(), kFeatureNames.end());
  for (const auto& entry : n_catalog.entries) {
    if (feature_index(entry.feature) < 0) throw MissingCatalogEntry(entry.feature);
    spec.n_models.push_back(entry.winning_model());
  }
  for (const auto& entry : m_catalog.entries) {
    if (feature_index(entry.feature) < 0) throw MissingCatalogEntry(entry.feature);
    spec.m_models.push_back(entry.winning_model());
  }

  // z-score per input, fitted on the training split only.
  const Eigen::Index dim = spec.input_dim();
  const Eigen::Index n = static_cast<Eigen::Index>(train.size());
  Matrix raw(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    raw.row(i) = assemble_features(train.records[static_cast<std::size_t>(i)], spec).transpose();
  }
  spec.normalization.shift = raw.colwise().mean();
  Vector scale(dim);
  spec.normalization.constant.assign(static_cast<std::size_t>(dim), false);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const double var = (raw.col(c).array() - spec.normalization.shift[c]).square().mean();
    scale[c] = std::sqrt(var);
    if (scale[c] == 0.0) {
      scale[c] = 1.0;  // constant input stays at zero
      spec.normalization.constant[static_cast<std::size_t>(c)] = true;
    }
  }
  spec.normalization.scale = std::move(scale);
  return spec;
}

Vector assemble_features(const DailyRecord& record, const FeatureSpec& spec) {
  Vector out(spec.input_dim());
  Eigen::Index pos = 0;
  for (const auto& name : spec.raw_features) {
    const int idx = feature_index(name);
    if (idx < 0) throw MissingCatalogEntry(name);
    out[pos++] = feature_value(record, idx);
  }

  double n_pred_sum = 0.0;
  for (const auto& model : spec.n_models) {
    const int idx = feature_index(model.input_name);
    if (idx < 0) throw MissingCatalogEntry(model.input_name);
    const double pred = evaluate(model, feature_value(record, idx));
    n_pred_sum += pred;
    out[pos++] = pred;
  }

  double m_pred_sum = 0.0;
  for (const auto& model : spec.m_models) {
    const int idx = feature_index(model.input_name);
    if (idx < 0) throw MissingCatalogEntry(model.input_name);
    m_pred_sum += evaluate(model, feature_value(record, idx));
  }

  out[pos++] = spec.n_models.empty() ? 0.0 : n_pred_sum / static_cast<double>(spec.n_models.size());
  out[pos++] = spec.m_models.empty() ? 0.0 : m_pred_sum / static_cast<double>(spec.m_models.size());
  return out;
}

Vector build_features(const DailyRecord& record, const FeatureSpec& spec) {
  const Vector raw = assemble_features(record, spec);
  if (raw.size() != spec.normalization.shift.size()) {
    throw DimensionMismatch("feature spec normalization does not match input_dim");
  }
  return ((raw - spec.normalization.shift).array() / spec.normalization.scale.array()).matrix();
}

Matrix build_feature_matrix(const Dataset& ds, const FeatureSpec& spec) {
  Matrix out(static_cast<Eigen::Index>(ds.size()), spec.input_dim());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = build_features(ds.records[i], spec).transpose();
  }
  return out;
}

Matrix target_matrix(const Dataset& ds) {
  Matrix out(static_cast<Eigen::Index>(ds.size()), kOutputCount);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out(static_cast<Eigen::Index>(i), 0) = ds.records[i].n_sustained;
    out(static_cast<Eigen::Index>(i), 1) = ds.records[i].m_momentary;
  }
  return out;
}

Matrix hidden_matrix(const MlpNetwork& net, ConstMatrixRef inputs) {
  if (inputs.cols() != net.inputs()) {
    throw DimensionMismatch("hidden_matrix: input columns != network inputs");
  }
  Matrix pre = inputs * net.w.transpose();
  pre.rowwise() += net.b_hidden.transpose();
  return pre.unaryExpr([](double z) { return sigmoid(z); });
}

Vector forward(const MlpNetwork& net, ConstVectorRef x) {
  if (x.size() != net.inputs()) throw DimensionMismatch("forward: input length != network inputs");
  const Vector hidden = (net.w * x + net.b_hidden).unaryExpr([](double z) { return sigmoid(z); });
  return net.v.transpose() * hidden + net.b_out;  // identity output activation
}

Matrix forward_all(const MlpNetwork& net, ConstMatrixRef inputs) {
  Matrix out = hidden_matrix(net, inputs) * net.v;
  out.rowwise() += net.b_out.transpose();
  return out;
}

ElmSolution elm_solve(ConstMatrixRef H, ConstMatrixRef Y, double lambda) {
  if (H.rows() != Y.rows()) throw DimensionMismatch("elm_solve: H and Y row counts differ");
  if (H.rows() < 1) throw DimensionMismatch("elm_solve: empty system");
  if (lambda < 0.0) throw ConfigError("elm_solve: lambda must be >= 0");

  if (lambda == 0.0) {
    // Unregularized path: the Cholesky can complete on a numerically
    // singular normal matrix, so guard the rank explicitly.
    Eigen::ColPivHouseholderQR<Matrix> qr(H);
    if (qr.rank() < H.cols()) {
      throw SingularSystem("H is rank deficient and lambda = 0");
    }
  }
  Matrix normal = H.transpose() * H;
  normal.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw SingularSystem("H^T H + lambda I is not positive definite (lambda = " +
                         std::to_string(lambda) + ")");
  }
  ElmSolution solution;
  solution.v = llt.solve(H.transpose() * Y);
  if (!solution.v.allFinite()) throw SingularSystem("elm_solve produced non-finite weights");
  solution.b_out = (Y - H * solution.v).colwise().mean();
  return solution;
}

void validate(const ElmConfig& cfg) {
  if (cfg.delta < 1.0 || cfg.delta > 2.0) throw ConfigError("delta must lie in [1, 2]");
  if (cfg.delta1 != 2.0 || cfg.delta2 != 2.0) {
    throw ConfigError("only delta1 = delta2 = 2 admits the closed-form output solve");
  }
  if (cfg.restarts < 1) throw ConfigError("restarts must be >= 1");
  if (cfg.hidden_count < 1) throw ConfigError("hidden_count must be >= 1");
  if (cfg.lambda_override && *cfg.lambda_override < 0.0) {
    throw ConfigError("lambda_override must be >= 0");
  }
}

namespace {

/// Hidden layer drawn uniformly from [-1, 1]; the stream is split from the
/// master seed per restart, so ordering of restarts cannot matter.
MlpNetwork random_hidden_layer(Eigen::Index inputs, int hidden, std::uint64_t seed, int restart) {
  Rng rng(seed, static_cast<std::uint64_t>(restart));
  MlpNetwork net;
  net.w.resize(hidden, inputs);
  for (Eigen::Index j = 0; j < hidden; ++j) {
    for (Eigen::Index i = 0; i < inputs; ++i) net.w(j, i) = rng.uniform(-1.0, 1.0);
  }
  net.b_hidden.resize(hidden);
  for (Eigen::Index j = 0; j < hidden; ++j) net.b_hidden[j] = rng.uniform(-1.0, 1.0);
  return net;
}

}  // namespace

TrainedForecaster elm_train(const Dataset& train, const Dataset& validate,
                            const FeatureSpec& spec, const ElmConfig& cfg) {
  gridcast::validate(cfg);
  if (train.size() < kMinDatasetSize) throw DatasetTooSmall(train.size(), kMinDatasetSize);
  if (validate.empty()) throw DatasetTooSmall(0, 1);

  const Matrix x_train = build_feature_matrix(train, spec);
  const Matrix y_train = target_matrix(train);
  const Matrix x_validate = build_feature_matrix(validate, spec);
  const Matrix y_validate = target_matrix(validate);

  const double lambda =
      cfg.lambda_override ? *cfg.lambda_override : std::pow(y_train.norm(), cfg.delta);

  TrainedForecaster result;
  result.feature_spec = spec;
  result.lambda = lambda;

  double best_score = std::numeric_limits<double>::infinity();
  std::string last_failure;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    MlpNetwork net = random_hidden_layer(x_train.cols(), cfg.hidden_count, cfg.seed, restart);
    for (std::size_t c = 0; c < spec.normalization.constant.size(); ++c) {
      if (spec.normalization.constant[c]) net.w.col(static_cast<Eigen::Index>(c)).setZero();
    }
    Matrix H;
    ElmSolution solution;
    try {
      H = hidden_matrix(net, x_train);
      solution = elm_solve(H, y_train, lambda);
    } catch (const SingularSystem& e) {
      last_failure = e.what();
      continue;
    }
    net.v = std::move(solution.v);
    net.b_out = std::move(solution.b_out);

    RestartStats stats;
    Matrix pred_train = H * net.v;
    pred_train.rowwise() += net.b_out.transpose();
    stats.train_mse = mse(pred_train, y_train);
    stats.validate_mse = mse(forward_all(net, x_validate), y_validate);
    result.restart_trace.push_back(stats);

    const double score = stats.validate_mse.sum();
    if (score < best_score) {
      best_score = score;
      result.network = std::move(net);
      result.train_mse = stats.train_mse;
      result.validate_mse = stats.validate_mse;
      result.chosen_restart = restart;
    }
  }
  if (result.restart_trace.empty()) {
    throw SingularSystem("every restart failed: " + last_failure);
  }
  return result;
}

Eigen::Vector2d mse(ConstMatrixRef predictions, ConstMatrixRef targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    throw DimensionMismatch("mse: shapes differ");
  }
  if (predictions.cols() != kOutputCount) throw DimensionMismatch("mse: expected 2 outputs");
  const Vector per_output = (predictions - targets).array().square().colwise().mean();
  return Eigen::Vector2d(per_output[0], per_output[1]);
}

}  // namespace gridcast
