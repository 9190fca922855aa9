#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridcast/regression.hpp"
#include "gridcast/types.hpp"

namespace gridcast {

inline constexpr int kOutputCount = 2;  // (N, M)
inline constexpr int kDefaultHiddenCount = 10;

enum class Activation { sigmoid, identity };

std::string_view activation_name(Activation a);
std::optional<Activation> activation_from_name(std::string_view name);

double sigmoid(double z);

/// Per-input affine normalization: x_norm = (x - shift) / scale. Inputs that
/// were constant on the training split keep scale 1 and are flagged; the
/// trainer zeroes their hidden weights, since a derivative with respect to an
/// input that never varies is noise, not signal.
struct Normalization {
  Vector shift;
  Vector scale;
  std::vector<bool> constant;
};

/// Describes how a DailyRecord becomes the network input vector:
/// 11 normalized raw features, then one normalized regression prediction per
/// kept feature from the N catalog, then two normalized aggregates (the mean
/// N-catalog prediction and the mean M-catalog prediction). 24 inputs with
/// full catalogs.
struct FeatureSpec {
  std::vector<std::string> raw_features;  // raw input order; the 11 names
  std::vector<RegressionModel> n_models;  // winners; input_name says which feature
  std::vector<RegressionModel> m_models;
  Normalization normalization;

  [[nodiscard]] int input_dim() const {
    return static_cast<int>(raw_features.size() + n_models.size()) + 2;
  }
};

/// Fits the normalization on the training split and wires in the catalog
/// winners. Throws MissingCatalogEntry when a catalog names an unknown
/// feature.
FeatureSpec make_feature_spec(const Dataset& train, const ModelCatalog& n_catalog,
                              const ModelCatalog& m_catalog);

/// Input vector before normalization; exposed for sensitivity and tests.
Vector assemble_features(const DailyRecord& record, const FeatureSpec& spec);

/// Normalized network input (length spec.input_dim()).
Vector build_features(const DailyRecord& record, const FeatureSpec& spec);

/// One row of build_features per record.
Matrix build_feature_matrix(const Dataset& ds, const FeatureSpec& spec);

/// Stacked (n, m) targets, one row per record.
Matrix target_matrix(const Dataset& ds);

/// Single-hidden-layer perceptron. Hidden activation G is the logistic
/// sigmoid; output activation F is the identity, which is what makes the
/// output layer solvable in closed form.
struct MlpNetwork {
  Matrix w;         // hidden x inputs
  Vector b_hidden;  // hidden
  Matrix v;         // hidden x outputs
  Vector b_out;     // outputs
  Activation g_activation = Activation::sigmoid;
  Activation f_activation = Activation::identity;

  [[nodiscard]] Eigen::Index inputs() const { return w.cols(); }
  [[nodiscard]] Eigen::Index hidden() const { return w.rows(); }
  [[nodiscard]] Eigen::Index outputs() const { return v.cols(); }
};

/// Output for one input vector. Throws DimensionMismatch.
Vector forward(const MlpNetwork& net, ConstVectorRef x);

/// Row-per-sample forward pass.
Matrix forward_all(const MlpNetwork& net, ConstMatrixRef inputs);

/// Hidden-layer output matrix: H(k, j) = G(w_j . x_k + b_j).
Matrix hidden_matrix(const MlpNetwork& net, ConstMatrixRef inputs);

/// Ridge solution of the output layer plus a mean-residual output bias.
struct ElmSolution {
  Matrix v;      // hidden x outputs
  Vector b_out;  // outputs; mean residual per output after the solve
};

/// v = (H^T H + lambda I)^-1 H^T Y via a Cholesky factorization of the
/// regularized normal matrix (never an explicit inverse); lambda lands on
/// every diagonal entry. b_out holds the per-output mean residual.
/// Throws SingularSystem when lambda = 0 and H is rank deficient.
ElmSolution elm_solve(ConstMatrixRef H, ConstMatrixRef Y, double lambda);

struct ElmConfig {
  double delta = 1.0;  // lambda = ||Y||_F ^ delta, delta in [1, 2]
  double delta1 = 2.0;  // norm exponents of the training objective; only the
  double delta2 = 2.0;  // quadratic case has the closed-form solve
  std::uint64_t seed = 0;
  int restarts = 10;
  int hidden_count = kDefaultHiddenCount;
  /// Test hook: bypasses the self-adjusting lambda entirely.
  std::optional<double> lambda_override;
};

/// Throws ConfigError on out-of-range fields (delta outside [1,2],
/// delta1/delta2 != 2, restarts < 1, hidden_count < 1).
void validate(const ElmConfig& cfg);

struct RestartStats {
  Eigen::Vector2d train_mse;
  Eigen::Vector2d validate_mse;
};

struct TrainedForecaster {
  FeatureSpec feature_spec;
  MlpNetwork network;
  Eigen::Vector2d train_mse{0.0, 0.0};
  Eigen::Vector2d validate_mse{0.0, 0.0};
  std::optional<Eigen::Vector2d> test_mse;  // filled by the pipeline
  std::vector<RestartStats> restart_trace;
  int chosen_restart = 0;
  double lambda = 0.0;
};

/// Runs cfg.restarts independent restarts: hidden weights and biases drawn
/// uniformly from [-1, 1] with a per-restart stream split from cfg.seed,
/// lambda = ||Y_train||_F ^ delta, output layer solved in closed form.
/// Returns the restart with the smallest summed validate MSE; the trace
/// keeps every restart. Throws SingularSystem only if every restart fails.
TrainedForecaster elm_train(const Dataset& train, const Dataset& validate,
                            const FeatureSpec& spec, const ElmConfig& cfg);

/// Per-output mean squared error; rows are samples.
Eigen::Vector2d mse(ConstMatrixRef predictions, ConstMatrixRef targets);

}  // namespace gridcast
