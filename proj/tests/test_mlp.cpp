#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gridcast/errors.hpp"
#include "gridcast/mlp.hpp"
#include "gridcast/rng.hpp"
#include "gridcast/synth.hpp"

using namespace gridcast;

namespace {

MlpNetwork random_network(Rng& rng, int inputs, int hidden, int outputs = 2) {
  MlpNetwork net;
  net.w.resize(hidden, inputs);
  net.b_hidden.resize(hidden);
  net.v.resize(hidden, outputs);
  net.b_out.resize(outputs);
  for (int j = 0; j < hidden; ++j) {
    for (int i = 0; i < inputs; ++i) net.w(j, i) = rng.uniform(-1.0, 1.0);
    net.b_hidden[j] = rng.uniform(-1.0, 1.0);
    for (int o = 0; o < outputs; ++o) net.v(j, o) = rng.uniform(-2.0, 2.0);
  }
  for (int o = 0; o < outputs; ++o) net.b_out[o] = rng.uniform(-1.0, 1.0);
  return net;
}

/// Straight-line re-implementation of the forward pass with plain loops;
/// shares nothing with the library path but the activation definitions.
std::vector<double> forward_by_hand(const MlpNetwork& net, const Vector& x) {
  std::vector<double> out(static_cast<std::size_t>(net.outputs()), 0.0);
  for (Eigen::Index o = 0; o < net.outputs(); ++o) {
    double acc = net.b_out[o];
    for (Eigen::Index j = 0; j < net.hidden(); ++j) {
      double pre = net.b_hidden[j];
      for (Eigen::Index i = 0; i < net.inputs(); ++i) pre += net.w(j, i) * x[i];
      acc += net.v(j, o) / (1.0 + std::exp(-pre));
    }
    out[static_cast<std::size_t>(o)] = acc;
  }
  return out;
}

/// Identity winners for every feature: prediction inputs mirror the raw ones.
FeatureSpec identity_spec(const Dataset& train) {
  ModelCatalog n_cat, m_cat;
  n_cat.target = Target::sustained;
  m_cat.target = Target::momentary;
  for (const auto& name : kFeatureNames) {
    CatalogEntry entry;
    entry.feature = std::string(name);
    ScoredModel scored;
    scored.model.kind = ModelKind::polynomial;
    scored.model.degree = 1;
    scored.model.beta = Vector::Zero(2);
    scored.model.beta[1] = 1.0;
    scored.model.input_name = entry.feature;
    entry.candidates.push_back(scored);
    entry.winner = 0;
    n_cat.entries.push_back(entry);
    m_cat.entries.push_back(entry);
  }
  return make_feature_spec(train, n_cat, m_cat);
}

Dataset random_dataset(Rng& rng, int n) {
  Dataset ds;
  for (int i = 0; i < n; ++i) {
    DailyRecord r;
    r.weather.date = Date{2015, 1, 1} + i;
    r.weather.t_ave = rng.uniform(50.0, 90.0);
    r.weather.t_max = r.weather.t_ave + rng.uniform(0.0, 10.0);
    r.weather.t_min = r.weather.t_ave - rng.uniform(0.0, 10.0);
    r.weather.hdd = std::max(0.0, 65.0 - r.weather.t_ave);
    r.weather.cdd = std::max(0.0, r.weather.t_ave - 65.0);
    r.weather.w_ave = rng.uniform(2.0, 15.0);
    r.weather.w_pea = r.weather.w_ave + rng.uniform(0.0, 20.0);
    r.weather.w_sus = r.weather.w_ave + rng.uniform(0.0, 5.0);
    r.weather.p_rain = rng.exponential(0.4);
    r.weather.pressure = rng.uniform(29.6, 30.4);
    r.weather.lightning = static_cast<double>(rng.uniform_int(0, 900));
    r.n_sustained = static_cast<double>(rng.uniform_int(0, 40));
    r.m_momentary = static_cast<double>(rng.uniform_int(0, 60));
    ds.records.push_back(r);
  }
  return ds;
}

}  // namespace

TEST_CASE("build_features centers to zero at the training means with identity catalogs") {
  Rng rng(301);
  Dataset train = random_dataset(rng, 80);
  const FeatureSpec spec = identity_spec(train);
  REQUIRE(spec.input_dim() == 24);

  // A record sitting exactly at the per-feature training means.
  DailyRecord mean_record;
  mean_record.weather.date = Date{2016, 1, 1};
  for (int f = 0; f < kFeatureCount; ++f) {
    double sum = 0.0;
    for (const auto& r : train.records) sum += feature_value(r, f);
    feature_ref(mean_record.weather, f) = sum / static_cast<double>(train.size());
  }
  const Vector x = build_features(mean_record, spec);
  REQUIRE(x.size() == 24);
  for (int i = 0; i < x.size(); ++i) CHECK(std::abs(x[i]) < 1e-9);
}

TEST_CASE("build_features output length and prediction slots") {
  const SyntheticData data = generate(default_spec(5));
  Dataset train = data.dataset;
  train.records.resize(100);
  const ModelCatalog n_cat = fit_catalog(train, Target::sustained);
  const ModelCatalog m_cat = fit_catalog(train, Target::momentary);
  const FeatureSpec spec = make_feature_spec(train, n_cat, m_cat);
  CHECK(spec.input_dim() == 24);

  const DailyRecord& record = train.records[17];
  const Vector x = build_features(record, spec);
  REQUIRE(x.size() == 24);

  // Positions 11..21 hold the normalized N-catalog winner predictions.
  for (std::size_t k = 0; k < spec.n_models.size(); ++k) {
    const auto& model = spec.n_models[k];
    const double pred = evaluate(model, feature_value(record, feature_index(model.input_name)));
    const auto pos = static_cast<Eigen::Index>(11 + k);
    const double expected = (pred - spec.normalization.shift[pos]) / spec.normalization.scale[pos];
    CHECK(x[pos] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("forward trivial networks") {
  SUBCASE("all-zero weights with zero output bias give (0, 0)") {
    MlpNetwork net;
    net.w = Matrix::Zero(10, 24);
    net.b_hidden = Vector::Zero(10);
    net.v = Matrix::Zero(10, 2);
    net.b_out = Vector::Zero(2);
    const Vector y = forward(net, Vector::Ones(24));
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 0.0);
  }
  SUBCASE("single constant hidden unit: 1 + 2 * sigmoid(0) = 2") {
    MlpNetwork net;
    net.w = Matrix::Zero(1, 3);
    net.b_hidden = Vector::Zero(1);
    net.v = Matrix::Constant(1, 2, 2.0);
    net.b_out = Vector::Ones(2);
    for (double value : {-5.0, 0.0, 17.0}) {
      const Vector y = forward(net, Vector::Constant(3, value));
      CHECK(y[0] == doctest::Approx(2.0));
      CHECK(y[1] == doctest::Approx(2.0));
    }
  }
  SUBCASE("dimension mismatch is rejected") {
    MlpNetwork net;
    net.w = Matrix::Zero(2, 4);
    net.b_hidden = Vector::Zero(2);
    net.v = Matrix::Zero(2, 2);
    net.b_out = Vector::Zero(2);
    CHECK_THROWS_AS(forward(net, Vector::Zero(5)), DimensionMismatch);
  }
}

TEST_CASE("forward matches an independent loop re-implementation") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const MlpNetwork net = random_network(rng, 24, 10);
    Vector x(24);
    for (int i = 0; i < 24; ++i) x[i] = rng.uniform(-3.0, 3.0);
    const Vector got = forward(net, x);
    const auto expected = forward_by_hand(net, x);
    CHECK(std::abs(got[0] - expected[0]) < 1e-12);
    CHECK(std::abs(got[1] - expected[1]) < 1e-12);
  }
}

TEST_CASE("hidden_matrix") {
  SUBCASE("zero pre-activation gives sigmoid(0) = 0.5") {
    MlpNetwork net;
    net.w = Matrix::Zero(1, 1);
    net.b_hidden = Vector::Zero(1);
    net.v = Matrix::Zero(1, 2);
    net.b_out = Vector::Zero(2);
    const Matrix H = hidden_matrix(net, Matrix::Constant(1, 1, 9.0));
    CHECK(H(0, 0) == 0.5);
  }
  SUBCASE("zero weights make every row identical") {
    Rng rng(4);
    MlpNetwork net = random_network(rng, 6, 4);
    net.w.setZero();
    Matrix inputs(5, 6);
    for (int i = 0; i < 30; ++i) inputs(i / 6, i % 6) = rng.uniform(-2.0, 2.0);
    const Matrix H = hidden_matrix(net, inputs);
    for (int k = 1; k < 5; ++k) CHECK((H.row(k) - H.row(0)).norm() == 0.0);
  }
  SUBCASE("rows reproduce forward's outputs through v") {
    Rng rng(8);
    const MlpNetwork net = random_network(rng, 24, 10);
    Matrix inputs(5, 24);
    for (int i = 0; i < inputs.size(); ++i) inputs(i / 24, i % 24) = rng.uniform(-2.0, 2.0);
    const Matrix H = hidden_matrix(net, inputs);
    REQUIRE(H.rows() == 5);
    REQUIRE(H.cols() == 10);
    for (int k = 0; k < 5; ++k) {
      const Vector expected = net.v.transpose() * H.row(k).transpose() + net.b_out;
      const Vector direct = forward(net, inputs.row(k).transpose());
      CHECK((expected - direct).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}

TEST_CASE("elm_solve") {
  SUBCASE("identity H with lambda 0 returns Y exactly") {
    const Matrix H = Matrix::Identity(6, 6);
    Matrix Y(6, 2);
    Rng rng(13);
    for (int i = 0; i < 12; ++i) Y(i / 2, i % 2) = rng.uniform(-4.0, 4.0);
    const ElmSolution solution = elm_solve(H, Y, 0.0);
    CHECK((solution.v - Y).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(solution.b_out.lpNorm<Eigen::Infinity>() < 1e-14);
  }
  SUBCASE("ridge norm shrinks monotonically in lambda") {
    Rng rng(29);
    Matrix H(40, 8), Y(40, 2);
    for (int i = 0; i < H.size(); ++i) H(i / 8, i % 8) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < Y.size(); ++i) Y(i / 2, i % 2) = rng.uniform(-10.0, 10.0);
    double previous = std::numeric_limits<double>::infinity();
    for (const double lambda : {0.0, 0.1, 1.0, 10.0, 100.0}) {
      const double norm = elm_solve(H, Y, lambda).v.norm();
      CHECK(norm <= previous * (1.0 + 1e-12));
      previous = norm;
    }
  }
  SUBCASE("matches a brute-force normal-equation oracle") {
    Rng rng(31);
    Matrix H(50, 10), Y(50, 2);
    for (int i = 0; i < H.size(); ++i) H(i / 10, i % 10) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < Y.size(); ++i) Y(i / 2, i % 2) = rng.uniform(-20.0, 20.0);
    const double lambda = 0.7;
    const Matrix oracle =
        (H.transpose() * H + lambda * Matrix::Identity(10, 10)).inverse() * H.transpose() * Y;
    const ElmSolution solution = elm_solve(H, Y, lambda);
    CHECK((solution.v - oracle).norm() <= 1e-8 * oracle.norm());
  }
  SUBCASE("rank-deficient H with lambda 0 raises SingularSystem") {
    Matrix H(6, 3);
    Rng rng(3);
    for (int i = 0; i < 6; ++i) {
      H(i, 0) = rng.uniform(-1.0, 1.0);
      H(i, 1) = 2.0 * H(i, 0);  // duplicate direction
      H(i, 2) = rng.uniform(-1.0, 1.0);
    }
    const Matrix Y = Matrix::Ones(6, 2);
    CHECK_THROWS_AS(elm_solve(H, Y, 0.0), SingularSystem);
    CHECK_NOTHROW(elm_solve(H, Y, 1e-6));
  }
  SUBCASE("returned v locally minimizes the regularized objective") {
    // Objective whose minimizer is the pinned closed form:
    // J(v) = lambda ||v||^2 + ||H v - Y||^2.
    Rng rng(41);
    Matrix H(30, 6), Y(30, 2);
    for (int i = 0; i < H.size(); ++i) H(i / 6, i % 6) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < Y.size(); ++i) Y(i / 2, i % 2) = rng.uniform(-5.0, 5.0);
    const double lambda = 2.5;
    const Matrix v = elm_solve(H, Y, lambda).v;
    const auto objective = [&](const Matrix& candidate) {
      return lambda * candidate.squaredNorm() + (H * candidate - Y).squaredNorm();
    };
    const double at_solution = objective(v);
    for (int trial = 0; trial < 100; ++trial) {
      Matrix direction(6, 2);
      for (int i = 0; i < 12; ++i) direction(i / 2, i % 2) = rng.normal(0.0, 1.0);
      direction /= direction.norm();
      CHECK(objective(v + 1e-4 * direction) >= at_solution);
    }
  }
}

TEST_CASE("elm config validation") {
  ElmConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.delta = 0.5;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.delta = 1.0;
  cfg.delta1 = 1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.delta1 = 2.0;
  cfg.restarts = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("elm_train") {
  Rng rng(91);
  Dataset train = random_dataset(rng, 60);
  Dataset validate = random_dataset(rng, 20);
  const FeatureSpec spec = identity_spec(train);

  SUBCASE("interpolation: targets in the column space of H reach ~zero train MSE") {
    ElmConfig cfg;
    cfg.seed = 7;
    cfg.restarts = 1;
    cfg.hidden_count = 10;
    cfg.lambda_override = 0.0;
    // Train once to discover restart 0's hidden layer, then rewrite the
    // targets as an exact combination of its hidden outputs. The same seed
    // redraws the identical layer.
    const TrainedForecaster probe = elm_train(train, validate, spec, cfg);
    const Matrix H = hidden_matrix(probe.network, build_feature_matrix(train, spec));
    Matrix v_true(10, 2);
    for (int i = 0; i < 20; ++i) v_true(i / 2, i % 2) = 0.5 + 0.1 * (i % 7);
    const Matrix targets = H * v_true;
    Dataset exact = train;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      exact.records[i].n_sustained = targets(static_cast<Eigen::Index>(i), 0);
      exact.records[i].m_momentary = targets(static_cast<Eigen::Index>(i), 1);
    }
    const TrainedForecaster trained = elm_train(exact, validate, spec, cfg);
    CHECK(trained.train_mse[0] < 1e-16);
    CHECK(trained.train_mse[1] < 1e-16);
  }

  SUBCASE("best of 20 restarts is at least as good as a single restart") {
    ElmConfig one;
    one.seed = 5;
    one.restarts = 1;
    ElmConfig twenty = one;
    twenty.restarts = 20;
    const auto single = elm_train(train, validate, spec, one);
    const auto best = elm_train(train, validate, spec, twenty);
    CHECK(best.validate_mse.sum() <= single.validate_mse.sum() + 1e-12);
  }

  SUBCASE("identical seeds produce bit-identical forecasters") {
    ElmConfig cfg;
    cfg.seed = 1234;
    cfg.restarts = 4;
    const auto a = elm_train(train, validate, spec, cfg);
    const auto b = elm_train(train, validate, spec, cfg);
    CHECK(a.network.w == b.network.w);
    CHECK(a.network.b_hidden == b.network.b_hidden);
    CHECK(a.network.v == b.network.v);
    CHECK(a.network.b_out == b.network.b_out);
    CHECK(a.train_mse == b.train_mse);
    CHECK(a.validate_mse == b.validate_mse);
    CHECK(a.chosen_restart == b.chosen_restart);
  }

  SUBCASE("reported validate MSE is the minimum over the restart trace") {
    ElmConfig cfg;
    cfg.seed = 77;
    cfg.restarts = 12;
    const auto trained = elm_train(train, validate, spec, cfg);
    REQUIRE(trained.restart_trace.size() == 12);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& stats : trained.restart_trace) {
      best = std::min(best, stats.validate_mse.sum());
    }
    CHECK(trained.validate_mse.sum() == best);
    for (const auto& stats : trained.restart_trace) {
      CHECK(trained.validate_mse.sum() <= stats.validate_mse.sum());
    }
  }

  SUBCASE("undersized training set is rejected") {
    Dataset tiny = train;
    tiny.records.resize(20);
    CHECK_THROWS_AS(elm_train(tiny, validate, spec, ElmConfig{}), DatasetTooSmall);
  }
}

TEST_CASE("mse") {
  Matrix pred(3, 2);
  pred << 1, 2, 3, 4, 5, 6;
  SUBCASE("zero error") {
    const Eigen::Vector2d err = mse(pred, pred);
    CHECK(err[0] == 0.0);
    CHECK(err[1] == 0.0);
  }
  SUBCASE("constant offsets square per output") {
    Matrix target = pred;
    target.col(0).array() -= 1.0;
    target.col(1).array() -= 2.0;
    const Eigen::Vector2d err = mse(pred, target);
    CHECK(err[0] == doctest::Approx(1.0));
    CHECK(err[1] == doctest::Approx(4.0));
  }
  SUBCASE("matches a hand-rolled sum on random data") {
    Rng rng(2);
    Matrix p(10, 2), t(10, 2);
    for (int i = 0; i < 20; ++i) {
      p(i / 2, i % 2) = rng.uniform(0.0, 9.0);
      t(i / 2, i % 2) = rng.uniform(0.0, 9.0);
    }
    double sum0 = 0.0, sum1 = 0.0;
    for (int k = 0; k < 10; ++k) {
      sum0 += (p(k, 0) - t(k, 0)) * (p(k, 0) - t(k, 0));
      sum1 += (p(k, 1) - t(k, 1)) * (p(k, 1) - t(k, 1));
    }
    const Eigen::Vector2d err = mse(p, t);
    CHECK(err[0] == doctest::Approx(sum0 / 10.0).epsilon(1e-12));
    CHECK(err[1] == doctest::Approx(sum1 / 10.0).epsilon(1e-12));
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(mse(pred, Matrix::Zero(2, 2)), DimensionMismatch);
  }
}
