#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridcast/types.hpp"

namespace gridcast {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;
using ConstMatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

enum class ModelKind { polynomial, two_term_exponential };

std::string_view model_kind_name(ModelKind kind);

/// A fitted single-feature model: either a polynomial of degree 1..3 with
/// beta = (b0..bd), or b0 + b1*exp(b2*x) + b3*exp(b4*x).
struct RegressionModel {
  ModelKind kind = ModelKind::polynomial;
  int degree = 1;  // meaningful for polynomials only
  Vector beta;
  std::string input_name;

  [[nodiscard]] int coefficient_count() const {
    return kind == ModelKind::polynomial ? degree + 1 : 5;
  }
};

double evaluate(const RegressionModel& model, double x);

/// d f / d x at x, in closed form.
double evaluate_derivative(const RegressionModel& model, double x);

/// Pointwise evaluation. No clamping happens here; reporting layers clamp.
Vector predict(const RegressionModel& model, ConstVectorRef x);

/// Goodness-of-fit summary for one fitted model. When the target has zero
/// weighted variance, r_square/adj_r_square are left unset and the remaining
/// metrics are still reported.
struct FitReport {
  double sse = 0.0;
  std::optional<double> r_square;
  std::optional<double> adj_r_square;
  double rmse = 0.0;
  Eigen::Index dof = 0;  // residual degrees of freedom v = n - #coefficients
  Vector weights;
};

struct ExpFitOptions {
  int max_iterations = 200;
  /// Converged when ||grad SSE||_inf < grad_tol * (1 + SSE).
  double grad_tol = 1e-8;
  double initial_damping = 1e-3;
  /// Secondary stop for targets whose best two-term fit degenerates (a rate
  /// drifting to 0 or the two rates collapsing): the iteration is treated as
  /// converged after stall_iterations consecutive accepted steps that each
  /// improve the SSE by less than stall_tol * (1 + SSE). Noise-free targets
  /// reach the gradient rule long before this fires.
  double stall_tol = 1e-6;
  int stall_iterations = 8;
};

/// Weighted least squares on the Vandermonde design, with per-column
/// max-abs scaling to keep the solve well conditioned at degree 3.
/// Throws DimensionMismatch (size mismatch or fewer than degree+2 points)
/// and RankDeficient (< degree+1 distinct x values).
RegressionModel fit_polynomial(ConstVectorRef x, ConstVectorRef y, int degree,
                               ConstVectorRef weights);

/// Two-term exponential fit by damped Gauss-Newton with Levenberg-style
/// damping, run from 8 deterministic starts (rate pairs scaled by 1/range(x),
/// amplitudes seeded by linear least squares). Returns the converged start
/// with the lowest SSE. Throws NonConvergence when every start hits the
/// iteration cap, DimensionMismatch on degenerate input.
RegressionModel fit_exponential2(ConstVectorRef x, ConstVectorRef y, ConstVectorRef weights,
                                 const ExpFitOptions& opts = {});

/// Metrics from raw predicted values; `coefficient_count` fixes the residual
/// degrees of freedom. Throws DimensionMismatch when dof < 1.
FitReport goodness_of_fit_values(ConstVectorRef y, ConstVectorRef predicted,
                                 ConstVectorRef weights, int coefficient_count);

FitReport goodness_of_fit(const RegressionModel& model, ConstVectorRef x, ConstVectorRef y,
                          ConstVectorRef weights);

struct ScoredModel {
  RegressionModel model;
  FitReport report;
};

/// Index of the winning candidate: least RMSE; ties within relative 1e-6 go
/// to fewer coefficients, then lower SSE. Reordering candidates never
/// changes the winning model.
std::size_t select_best(std::span<const ScoredModel> candidates);

struct CatalogEntry {
  std::string feature;
  std::vector<ScoredModel> candidates;
  std::size_t winner = 0;

  [[nodiscard]] const RegressionModel& winning_model() const { return candidates[winner].model; }
};

/// Per-target collection of fitted per-feature models.
struct ModelCatalog {
  Target target = Target::sustained;
  std::vector<CatalogEntry> entries;

  struct DroppedFeature {
    std::string feature;
    std::string reason;
  };
  std::vector<DroppedFeature> dropped;

  [[nodiscard]] const CatalogEntry* find(std::string_view feature) const;
};

/// Fits all four candidates (polynomial 1..3, two-term exponential) for each
/// of the 11 weather features against the chosen target and selects a winner
/// per feature. Features whose every candidate fails are dropped and recorded.
/// Throws DatasetTooSmall below 30 records.
ModelCatalog fit_catalog(const Dataset& ds, Target target);

}  // namespace gridcast
