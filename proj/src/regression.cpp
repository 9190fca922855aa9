#include "gridcast/regression.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gridcast/errors.hpp"

namespace gridcast {

namespace {

constexpr double kExpArgCap = 700.0;  // exp() overflows just past 709

double safe_exp(double z) { return std::exp(std::min(z, kExpArgCap)); }

void check_sizes(ConstVectorRef x, ConstVectorRef y, ConstVectorRef w, const char* where) {
  if (x.size() != y.size() || x.size() != w.size()) {
    throw DimensionMismatch(std::string(where) + ": x, y, weights must share a length");
  }
}

Eigen::Index distinct_count(ConstVectorRef x) {
  std::vector<double> values(x.data(), x.data() + x.size());
  std::sort(values.begin(), values.end());
  return static_cast<Eigen::Index>(std::unique(values.begin(), values.end()) - values.begin());
}

double weighted_sse(ConstVectorRef y, ConstVectorRef f, ConstVectorRef w) {
  return (w.array() * (y - f).array().square()).sum();
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  return kind == ModelKind::polynomial ? "polynomial" : "two_term_exponential";
}

namespace {

/// Compensated Horner scheme (error-free transformations). Plain Horner on
/// raw cubic coefficients loses ~9 digits when the feature sits far from the
/// origin (pressure near 30 gives coefficients ~1e7 cancelling to ~10); the
/// compensation keeps evaluation accurate to a few ulps regardless.
double horner_compensated(const Vector& beta, double x) {
  const Eigen::Index n = beta.size();
  double sum = beta[n - 1];
  double compensation = 0.0;
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    const double product = sum * x;
    const double product_err = std::fma(sum, x, -product);
    sum = product + beta[i];
    // Knuth TwoSum error of (product + beta[i]).
    const double z = sum - product;
    const double sum_err = (product - (sum - z)) + (beta[i] - z);
    compensation = compensation * x + (product_err + sum_err);
  }
  return sum + compensation;
}

}  // namespace

double evaluate(const RegressionModel& model, double x) {
  if (model.kind == ModelKind::polynomial) {
    return horner_compensated(model.beta, x);
  }
  return model.beta[0] + model.beta[1] * safe_exp(model.beta[2] * x) +
         model.beta[3] * safe_exp(model.beta[4] * x);
}

double evaluate_derivative(const RegressionModel& model, double x) {
  if (model.kind == ModelKind::polynomial) {
    double acc = 0.0;
    for (Eigen::Index i = model.beta.size() - 1; i >= 1; --i) {
      acc = acc * x + static_cast<double>(i) * model.beta[i];
    }
    return acc;
  }
  return model.beta[1] * model.beta[2] * safe_exp(model.beta[2] * x) +
         model.beta[3] * model.beta[4] * safe_exp(model.beta[4] * x);
}

Vector predict(const RegressionModel& model, ConstVectorRef x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = evaluate(model, x[i]);
  return out;
}

RegressionModel fit_polynomial(ConstVectorRef x, ConstVectorRef y, int degree,
                               ConstVectorRef weights) {
  if (degree < 1 || degree > 3) throw ConfigError("polynomial degree must be 1..3");
  check_sizes(x, y, weights, "fit_polynomial");
  const Eigen::Index n = x.size();
  const Eigen::Index p = degree + 1;
  if (n < p + 1) {
    throw DimensionMismatch("fit_polynomial: need at least degree+2 points");
  }
  if (distinct_count(x) < p) {
    throw RankDeficient("fewer than degree+1 distinct x values");
  }

  Matrix design(n, p);
  design.col(0).setOnes();
  for (Eigen::Index c = 1; c < p; ++c) {
    design.col(c) = design.col(c - 1).array() * x.array();
  }

  // Column scaling keeps the QR well conditioned when features sit far from
  // the origin (pressure ~ 30 cubed).
  Vector scale(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    scale[c] = design.col(c).cwiseAbs().maxCoeff();
    if (scale[c] == 0.0) scale[c] = 1.0;
    design.col(c) /= scale[c];
  }

  const Vector sqrt_w = weights.array().sqrt();
  const Matrix weighted = sqrt_w.asDiagonal() * design;
  Eigen::ColPivHouseholderQR<Matrix> qr(weighted);
  if (qr.rank() < p) throw RankDeficient("weighted Vandermonde design is singular");
  Vector beta = qr.solve((sqrt_w.array() * y.array()).matrix());
  beta.array() /= scale.array();

  RegressionModel model;
  model.kind = ModelKind::polynomial;
  model.degree = degree;
  model.beta = std::move(beta);
  return model;
}

namespace {

struct ExpFitState {
  Vector beta;      // (b0, b1, b2, b3, b4)
  double sse = std::numeric_limits<double>::infinity();
  bool converged = false;
};

Vector exp_residual(ConstVectorRef x, ConstVectorRef y, const Vector& beta) {
  Vector f(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    f[i] = beta[0] + beta[1] * safe_exp(beta[2] * x[i]) + beta[3] * safe_exp(beta[4] * x[i]);
  }
  return y - f;
}

/// Amplitudes (b0, b1, b3) by weighted linear least squares given the rates.
bool solve_amplitudes(ConstVectorRef x, ConstVectorRef y, ConstVectorRef sqrt_w, double rate1,
                      double rate2, Vector& beta) {
  Matrix design(x.size(), 3);
  design.col(0).setOnes();
  design.col(1) = (rate1 * x.array()).min(kExpArgCap).exp();
  design.col(2) = (rate2 * x.array()).min(kExpArgCap).exp();
  const Matrix weighted = sqrt_w.asDiagonal() * design;
  const Vector rhs = (sqrt_w.array() * y.array()).matrix();
  const Vector amps = weighted.colPivHouseholderQr().solve(rhs);
  if (!amps.allFinite()) return false;
  beta.resize(5);
  beta << amps[0], amps[1], rate1, amps[2], rate2;
  return true;
}

ExpFitState gauss_newton_exp(ConstVectorRef x, ConstVectorRef y, ConstVectorRef w,
                             Vector beta, const ExpFitOptions& opts) {
  ExpFitState state;
  Vector r = exp_residual(x, y, beta);
  if (!r.allFinite()) return state;
  double sse = (w.array() * r.array().square()).sum();
  double damping = opts.initial_damping;
  int stalled = 0;

  Matrix jac(x.size(), 5);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double e1 = safe_exp(beta[2] * x[i]);
      const double e2 = safe_exp(beta[4] * x[i]);
      jac(i, 0) = 1.0;
      jac(i, 1) = e1;
      jac(i, 2) = beta[1] * x[i] * e1;
      jac(i, 3) = e2;
      jac(i, 4) = beta[3] * x[i] * e2;
    }
    const Vector jtwr = jac.transpose() * (w.array() * r.array()).matrix();
    const Vector grad = -2.0 * jtwr;  // gradient of the weighted SSE
    if (grad.lpNorm<Eigen::Infinity>() < opts.grad_tol * (1.0 + sse)) {
      state.beta = beta;
      state.sse = sse;
      state.converged = true;
      return state;
    }

    Matrix normal = jac.transpose() * w.asDiagonal() * jac;
    normal.diagonal().array() += damping;
    const Vector step = normal.ldlt().solve(jtwr);
    Vector candidate = beta + step;
    // The amplitudes are linear parameters; re-solving them at the stepped
    // rates is exact and can only lower the SSE. Without this the iteration
    // crawls through the near-collinear-rates valley.
    Vector refreshed;
    if (candidate.allFinite() &&
        solve_amplitudes(x, y, w.array().sqrt(), candidate[2], candidate[4], refreshed)) {
      candidate = std::move(refreshed);
    }
    const Vector r_candidate = exp_residual(x, y, candidate);
    const double sse_candidate =
        r_candidate.allFinite() ? (w.array() * r_candidate.array().square()).sum()
                                : std::numeric_limits<double>::infinity();
    if (std::isfinite(sse_candidate) && sse_candidate < sse) {
      const double improvement = sse - sse_candidate;
      beta = candidate;
      r = r_candidate;
      sse = sse_candidate;
      damping = std::max(damping * 0.1, 1e-12);
      stalled = improvement <= opts.stall_tol * (1.0 + sse) ? stalled + 1 : 0;
      if (stalled >= opts.stall_iterations) {
        state.beta = beta;
        state.sse = sse;
        state.converged = true;
        return state;
      }
    } else {
      damping = std::min(damping * 10.0, 1e12);
    }
  }
  state.beta = beta;
  state.sse = sse;
  return state;  // iteration cap: not converged
}

}  // namespace

RegressionModel fit_exponential2(ConstVectorRef x, ConstVectorRef y, ConstVectorRef weights,
                                 const ExpFitOptions& opts) {
  check_sizes(x, y, weights, "fit_exponential2");
  if (x.size() < 8) throw DimensionMismatch("fit_exponential2: need at least 8 points");
  const double range = x.maxCoeff() - x.minCoeff();
  if (range <= 0.0) throw DimensionMismatch("fit_exponential2: x is constant (non-identifiable)");

  // Rate pairs from {+-0.01, +-0.1, +-0.5} scaled by 1/range(x); both sign
  // mixes and asymmetric magnitudes are covered.
  static constexpr std::array<std::array<double, 2>, 8> kStarts = {{{0.5, -0.5},
                                                                    {0.1, -0.1},
                                                                    {0.01, -0.01},
                                                                    {0.5, 0.1},
                                                                    {-0.5, -0.1},
                                                                    {0.5, -0.1},
                                                                    {0.1, -0.5},
                                                                    {-0.5, 0.01}}};

  const Vector sqrt_w = weights.array().sqrt();
  ExpFitState best;
  int attempted = 0;
  for (const auto& [s1, s2] : kStarts) {
    Vector beta;
    if (!solve_amplitudes(x, y, sqrt_w, s1 / range, s2 / range, beta)) continue;
    ++attempted;
    ExpFitState state = gauss_newton_exp(x, y, weights, std::move(beta), opts);
    if (state.converged && state.sse < best.sse) best = state;
  }
  if (attempted == 0) throw RankDeficient("fit_exponential2: every start was degenerate");
  if (!best.converged) {
    throw NonConvergence("fit_exponential2: no start met the gradient tolerance within " +
                         std::to_string(opts.max_iterations) + " iterations");
  }

  RegressionModel model;
  model.kind = ModelKind::two_term_exponential;
  model.degree = 0;
  model.beta = std::move(best.beta);
  return model;
}

FitReport goodness_of_fit_values(ConstVectorRef y, ConstVectorRef predicted,
                                 ConstVectorRef weights, int coefficient_count) {
  check_sizes(y, predicted, weights, "goodness_of_fit");
  const Eigen::Index n = y.size();
  const Eigen::Index dof = n - coefficient_count;
  if (dof < 1) throw DimensionMismatch("goodness_of_fit: residual degrees of freedom < 1");

  FitReport report;
  report.weights = weights;
  report.dof = dof;
  report.sse = weighted_sse(y, predicted, weights);
  report.rmse = std::sqrt(report.sse / static_cast<double>(dof));

  const double weight_sum = weights.sum();
  const double y_mean = (weights.array() * y.array()).sum() / weight_sum;
  const double sst = (weights.array() * (y.array() - y_mean).square()).sum();
  if (sst > 0.0) {
    report.r_square = 1.0 - report.sse / sst;
    report.adj_r_square =
        1.0 - (report.sse * static_cast<double>(n - 1)) / (sst * static_cast<double>(dof));
  }
  return report;
}

FitReport goodness_of_fit(const RegressionModel& model, ConstVectorRef x, ConstVectorRef y,
                          ConstVectorRef weights) {
  return goodness_of_fit_values(y, predict(model, x), weights, model.coefficient_count());
}

std::size_t select_best(std::span<const ScoredModel> candidates) {
  double min_rmse = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) min_rmse = std::min(min_rmse, c.report.rmse);

  // Candidates within relative 1e-6 of the best RMSE tie; the tie breaks to
  // fewer coefficients, then lower SSE. RMSE below 1e-9 counts as exactly
  // zero: counts are integers, and which perfect fit carries less float dust
  // is not a meaningful ordering.
  auto tied = [&](const ScoredModel& c) {
    if (c.report.rmse <= 1e-9 && min_rmse <= 1e-9) return true;
    return c.report.rmse - min_rmse <= 1e-6 * std::max(min_rmse, c.report.rmse);
  };
  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!tied(candidates[i])) continue;
    if (best == candidates.size()) {
      best = i;
      continue;
    }
    const auto& a = candidates[i];
    const auto& b = candidates[best];
    const auto key = [](const ScoredModel& m) {
      return std::make_pair(m.model.coefficient_count(), m.report.sse);
    };
    if (key(a) < key(b)) best = i;
  }
  return best;
}

const CatalogEntry* ModelCatalog::find(std::string_view feature) const {
  for (const auto& entry : entries) {
    if (entry.feature == feature) return &entry;
  }
  return nullptr;
}

ModelCatalog fit_catalog(const Dataset& ds, Target target) {
  if (ds.size() < kMinDatasetSize) throw DatasetTooSmall(ds.size(), kMinDatasetSize);
  const Eigen::Index n = static_cast<Eigen::Index>(ds.size());

  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = target_value(ds.records[static_cast<std::size_t>(i)], target);
  const Vector weights = Vector::Ones(n);

  ModelCatalog catalog;
  catalog.target = target;
  for (int f = 0; f < kFeatureCount; ++f) {
    const std::string feature(kFeatureNames[static_cast<std::size_t>(f)]);
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = feature_value(ds.records[static_cast<std::size_t>(i)], f);
    }

    CatalogEntry entry;
    entry.feature = feature;
    std::string failures;
    auto try_fit = [&](auto&& fit) {
      try {
        RegressionModel model = fit();
        model.input_name = feature;
        FitReport report = goodness_of_fit(model, x, y, weights);
        entry.candidates.push_back(ScoredModel{std::move(model), std::move(report)});
      } catch (const Error& e) {
        if (!failures.empty()) failures += "; ";
        failures += e.what();
      }
    };
    for (int degree = 1; degree <= 3; ++degree) {
      try_fit([&] { return fit_polynomial(x, y, degree, weights); });
    }
    try_fit([&] { return fit_exponential2(x, y, weights); });

    if (entry.candidates.empty()) {
      catalog.dropped.push_back({feature, failures});
      continue;
    }
    entry.winner = select_best(entry.candidates);
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

}  // namespace gridcast
