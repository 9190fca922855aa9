#include "gridcast/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridcast/errors.hpp"

namespace gridcast {

Matrix analytic_input_gradient(const MlpNetwork& net, ConstVectorRef x) {
  if (x.size() != net.inputs()) {
    throw DimensionMismatch("analytic_input_gradient: input length != network inputs");
  }
  const Vector pre = net.w * x + net.b_hidden;
  Vector gprime(pre.size());
  for (Eigen::Index j = 0; j < pre.size(); ++j) {
    const double g = sigmoid(pre[j]);
    gprime[j] = g * (1.0 - g);
  }
  // dY_o/dx_i = sum_j v(j,o) G'(z_j) w(j,i)
  Matrix grad(net.inputs(), net.outputs());
  for (Eigen::Index o = 0; o < net.outputs(); ++o) {
    grad.col(o) = net.w.transpose() * (net.v.col(o).array() * gprime.array()).matrix();
  }
  return grad;
}

Matrix chain_to_raw(ConstMatrixRef input_gradient, const FeatureSpec& spec,
                    const DailyRecord& record) {
  const Eigen::Index outputs = input_gradient.cols();
  if (input_gradient.rows() != spec.input_dim()) {
    throw DimensionMismatch("chain_to_raw: gradient rows != spec input_dim");
  }
  const Vector& scale = spec.normalization.scale;
  const auto raw_count = static_cast<Eigen::Index>(spec.raw_features.size());
  const auto n_count = static_cast<Eigen::Index>(spec.n_models.size());

  Matrix raw = Matrix::Zero(kFeatureCount, outputs);

  // Raw-input path.
  for (Eigen::Index r = 0; r < raw_count; ++r) {
    const int p = feature_index(spec.raw_features[static_cast<std::size_t>(r)]);
    if (p < 0) throw MissingCatalogEntry(spec.raw_features[static_cast<std::size_t>(r)]);
    raw.row(p) += input_gradient.row(r) / scale[r];
  }

  // Per-feature N-catalog prediction inputs.
  for (Eigen::Index k = 0; k < n_count; ++k) {
    const auto& model = spec.n_models[static_cast<std::size_t>(k)];
    const int p = feature_index(model.input_name);
    if (p < 0) throw MissingCatalogEntry(model.input_name);
    const double slope = evaluate_derivative(model, feature_value(record, p));
    const Eigen::Index q = raw_count + k;
    raw.row(p) += input_gradient.row(q) * (slope / scale[q]);
  }

  // Aggregate inputs: mean of the N-catalog predictions, then the M's.
  const Eigen::Index agg_n = raw_count + n_count;
  const Eigen::Index agg_m = agg_n + 1;
  if (n_count > 0) {
    for (const auto& model : spec.n_models) {
      const int p = feature_index(model.input_name);
      const double slope = evaluate_derivative(model, feature_value(record, p));
      raw.row(p) +=
          input_gradient.row(agg_n) * (slope / (scale[agg_n] * static_cast<double>(n_count)));
    }
  }
  if (!spec.m_models.empty()) {
    const auto m_count = static_cast<double>(spec.m_models.size());
    for (const auto& model : spec.m_models) {
      const int p = feature_index(model.input_name);
      if (p < 0) throw MissingCatalogEntry(model.input_name);
      const double slope = evaluate_derivative(model, feature_value(record, p));
      raw.row(p) += input_gradient.row(agg_m) * (slope / (scale[agg_m] * m_count));
    }
  }
  return raw;
}

Matrix raw_gradient(const TrainedForecaster& forecaster, const DailyRecord& record) {
  const Vector x = build_features(record, forecaster.feature_spec);
  return chain_to_raw(analytic_input_gradient(forecaster.network, x), forecaster.feature_spec,
                      record);
}

SensitivityReport aggregate(const TrainedForecaster& forecaster, const Dataset& ds) {
  if (ds.empty()) throw DatasetTooSmall(0, 1);

  Matrix sums = Matrix::Zero(kFeatureCount, kOutputCount);
  for (const auto& record : ds.records) {
    sums += raw_gradient(forecaster, record).cwiseAbs();
  }
  sums /= static_cast<double>(ds.size());

  SensitivityReport report;
  report.parameters.assign(kFeatureNames.begin(), kFeatureNames.end());
  report.scores = sums;
  for (Eigen::Index o = 0; o < kOutputCount; ++o) {
    const double total = report.scores.col(o).sum();
    if (total > 0.0) report.scores.col(o) /= total;

    std::vector<std::size_t> order(kFeatureCount);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return report.scores(static_cast<Eigen::Index>(a), o) >
             report.scores(static_cast<Eigen::Index>(b), o);
    });
    auto& ranked = report.ranked[static_cast<std::size_t>(o)];
    for (const std::size_t idx : order) ranked.push_back(report.parameters[idx]);
  }
  return report;
}

}  // namespace gridcast
