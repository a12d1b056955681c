#include <doctest.h>

#include <cmath>

#include <Eigen/Cholesky>

#include "pgnnff/lip.hpp"
#include "pgnnff/rng.hpp"
#include "pgnnff/training.hpp"
#include "test_helpers.hpp"

using namespace pgnnff;
using namespace pgnnff::testing;

namespace {

const RegressorSpec kSpec{0, 2, 0, 1e-4};

double g_sin_tanh(const Regressor& phi) {
  return 5.0 * std::sin(2.0 * M_PI * phi.phi[0] / 0.025) +
         2.0 * std::tanh(delta(phi.phi[0], phi.phi[1], 1e-4) / 0.01);
}

struct Fixture {
  Dataset data;
  BasisMap map = BasisMap::clm(1e-4);
  LipParams lip;
  TrainingConfig cfg;

  explicit Fixture(std::uint64_t seed = 51, long n = 1200, bool with_g = true) {
    data = synth_clm_dataset(clm_theta0(), seed, n, 1e-4,
                             with_g ? g_sin_tanh : nullptr);
    lip = fit_lip(data, map, kSpec);
    cfg.theta_lip_ref = lip;
    cfg.lambda_diag = Vec::Constant(4, 0.01);
    cfg.seed = 3;
    cfg.hidden_widths = {16};
    cfg.optimizer.max_iterations = 50;
  }

  PGNNParams zero_nn_model(const Vec& theta_phy) const {
    PGNNParams p;
    p.nn = init_hidden_random({4, 16}, 1, 0.0);
    p.theta_phy = theta_phy;
    return p;
  }
};

double lip_mse(const Fixture& f) {
  return mse_cost(
      [&](const Regressor& phi) { return lip_predict(f.lip, f.map, phi); },
      f.data, kSpec);
}

}  // namespace

TEST_CASE("pgnn_predict") {
  Fixture f;
  const DesignMatrices d = build_design(f.data, f.map, kSpec, f.cfg);

  SUBCASE("zero NN with theta_phy = theta_LIP reproduces the LIP prediction") {
    const PGNNParams p = f.zero_nn_model(f.lip.theta);
    const Regressor phi = build_regressor(f.data, 10, kSpec);
    CHECK(pgnn_predict(p, f.map, d.scaling, phi) ==
          doctest::Approx(lip_predict(f.lip, f.map, phi)).epsilon(1e-15));
  }

  SUBCASE("zero theta_phy leaves the pure NN output") {
    PGNNParams p = f.zero_nn_model(Vec::Zero(4));
    p.nn.layers.back().B[0] = 1.25;
    const Regressor phi = build_regressor(f.data, 11, kSpec);
    CHECK(pgnn_predict(p, f.map, d.scaling, phi) == 1.25);
  }

  SUBCASE("equals the sum of independently computed parts") {
    Rng rng(8);
    PGNNParams p = f.zero_nn_model(Vec::Zero(4));
    for (auto& l : p.nn.layers) {
      for (long r = 0; r < l.W.rows(); ++r)
        for (long c = 0; c < l.W.cols(); ++c) l.W(r, c) = rng.uniform(-1, 1);
      for (long r = 0; r < l.B.size(); ++r) l.B[r] = rng.uniform(-1, 1);
    }
    for (int i = 0; i < 4; ++i) p.theta_phy[i] = rng.uniform(-5, 5);
    const Regressor phi = build_regressor(f.data, 37, kSpec);
    const Vec features = eval_basis(f.map, phi);
    const double nn_part =
        nn_forward(p.nn, features.cwiseProduct(d.scaling).eval());
    const double phy_part = p.theta_phy.dot(features);
    CHECK(rel_err(pgnn_predict(p, f.map, d.scaling, phi),
                  nn_part + phy_part) <= 1e-12);
  }
}

TEST_CASE("mse_cost") {
  Fixture f(52, 400, false);

  SUBCASE("perfect predictor") {
    CHECK(mse_cost([&](const Regressor& phi) {
            return lip_predict(LipParams{clm_theta0()}, f.map, phi);
          },
          f.data, kSpec) <= 1e-18);
  }

  SUBCASE("constant offset") {
    Dataset d;
    d.ts = 1e-4;
    d.y = smooth_positions(1, 50);
    d.u.assign(50, 3.0);
    CHECK(mse_cost([](const Regressor&) { return 0.0; }, d, kSpec) ==
          doctest::Approx(9.0));
  }

  SUBCASE("matches a naive loop") {
    const SampleRange r = valid_sample_range(kSpec, f.data.size());
    double naive = 0.0;
    for (long t = r.t_min; t <= r.t_max; ++t) {
      const double pred = 0.3 * f.data.y[t];
      naive += (f.data.u[t] - pred) * (f.data.u[t] - pred);
    }
    naive /= static_cast<double>(r.count());
    const double got = mse_cost(
        [](const Regressor& phi) { return 0.3 * phi.phi[0]; }, f.data, kSpec);
    CHECK(rel_err(got, naive) <= 1e-12);
  }
}

TEST_CASE("regularized_cost") {
  Fixture f;

  SUBCASE("anchor consistency: zero NN at the anchor costs the LIP MSE") {
    const PGNNParams p = f.zero_nn_model(f.lip.theta);
    const CostBreakdown c = regularized_cost(p, f.data, f.map, kSpec, f.cfg);
    CHECK(c.reg_term == 0.0);
    CHECK(rel_err(c.total, lip_mse(f)) <= 1e-12);
    CHECK(c.total == c.data_fit);
  }

  SUBCASE("identity Lambda with unit deviation adds exactly 1") {
    TrainingConfig cfg = f.cfg;
    cfg.lambda_diag = Vec::Ones(4);
    Vec theta = f.lip.theta;
    theta[0] += 1.0;
    const PGNNParams p = f.zero_nn_model(theta);
    const CostBreakdown c = regularized_cost(p, f.data, f.map, kSpec, cfg);
    CHECK(c.reg_term == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("Lambda = 0 reduces to the MSE") {
    TrainingConfig cfg = f.cfg;
    cfg.lambda_diag = Vec::Zero(4);
    Vec theta = f.lip.theta * 1.1;
    const PGNNParams p = f.zero_nn_model(theta);
    const CostBreakdown c = regularized_cost(p, f.data, f.map, kSpec, cfg);
    CHECK(c.reg_term == 0.0);
    CHECK(c.total == c.data_fit);
  }
}

TEST_CASE("pinn_cost") {
  Fixture f;
  const DesignMatrices d = build_design(f.data, f.map, kSpec, f.cfg);

  SUBCASE("lambda = 0 equals the NN-only MSE") {
    TrainingConfig cfg = f.cfg;
    cfg.pinn_lambda = 0.0;
    PGNNParams p = f.zero_nn_model(f.lip.theta);
    p.nn.layers.back().B[0] = 0.5;
    const CostBreakdown c = pinn_cost(p, f.data, f.map, kSpec, cfg);
    const double nn_mse = mse_cost(
        [&](const Regressor& phi) {
          return nn_forward(
              p.nn, eval_basis(f.map, phi).cwiseProduct(d.scaling).eval());
        },
        f.data, kSpec);
    CHECK(rel_err(c.total, nn_mse) <= 1e-12);
    CHECK(c.reg_term == 0.0);
  }

  SUBCASE("penalty vanishes when the NN reproduces the physical output") {
    // Identity-activation network wired to pass theta_phy^T T_phy through.
    TrainingConfig cfg = f.cfg;
    cfg.pinn_lambda = 0.7;
    PGNNParams p;
    p.nn.activation = Activation::Identity;
    NNLayer h;
    h.W = Mat::Identity(4, 4);
    h.B = Vec::Zero(4);
    NNLayer out;
    out.W = (f.lip.theta.cwiseQuotient(d.scaling)).transpose();
    out.B = Vec::Zero(1);
    p.nn.layers = {h, out};
    p.theta_phy = f.lip.theta;
    const CostBreakdown c = pinn_cost(p, f.data, f.map, kSpec, cfg);
    CHECK(c.reg_term <= 1e-16 * (1.0 + c.data_fit));
  }

  SUBCASE("matches a naive loop") {
    TrainingConfig cfg = f.cfg;
    cfg.pinn_lambda = 0.3;
    PGNNParams p = f.zero_nn_model((f.lip.theta * 0.9).eval());
    p.nn.layers.back().B[0] = 2.0;
    const CostBreakdown c = pinn_cost(p, f.data, f.map, kSpec, cfg);

    const SampleRange r = valid_sample_range(kSpec, f.data.size());
    double fit = 0.0, pen = 0.0;
    for (long t = r.t_min; t <= r.t_max; ++t) {
      const Vec feat =
          eval_basis(f.map, build_regressor(f.data, t, kSpec));
      const double u_nn = 2.0;  // zero hidden stack, bias only
      fit += (f.data.u[t] - u_nn) * (f.data.u[t] - u_nn);
      const double phys = p.theta_phy.dot(feat);
      pen += (u_nn - phys) * (u_nn - phys);
    }
    fit /= static_cast<double>(r.count());
    pen = 0.3 * pen / static_cast<double>(r.count());
    CHECK(rel_err(c.data_fit, fit) <= 1e-12);
    CHECK(rel_err(c.reg_term, pen) <= 1e-12);
  }
}

TEST_CASE("cost_gradient") {
  SUBCASE("stationary at the anchor on perfect LIP data") {
    Fixture f(53, 600, false);
    const PGNNParams p = f.zero_nn_model(f.lip.theta);
    const PgnnGradient g = cost_gradient(p, f.data, f.map, kSpec, f.cfg);
    CHECK(g.theta_phy.norm() <= 1e-8 * (1.0 + f.lip.theta.norm()));
  }

  SUBCASE("matches central finite differences") {
    Fixture f(54, 300);
    Rng rng(77);
    TrainingConfig cfg = f.cfg;
    PGNNParams p = init_output_layer(init_hidden_random({4, 8}, 5, 1.0),
                                     f.data, f.map, kSpec, cfg);
    // Perturb away from the restricted optimum so gradients are generic.
    p.theta_phy *= 1.05;
    p.nn.layers[0].W *= 0.9;

    const PgnnGradient g = cost_gradient(p, f.data, f.map, kSpec, cfg);
    const Vec flat = flatten_params(p);
    PGNNParams shaped = p;
    shaped.nn.layers = g.nn.layers;
    shaped.theta_phy = g.theta_phy;
    const Vec gflat = flatten_params(shaped);

    const double step = 1e-6;
    double worst = 0.0;
    for (long i = 0; i < flat.size(); ++i) {
      Vec fp = flat, fm = flat;
      fp[i] += step;
      fm[i] -= step;
      const double cp =
          regularized_cost(unflatten_params(fp, p), f.data, f.map, kSpec, cfg)
              .total;
      const double cm =
          regularized_cost(unflatten_params(fm, p), f.data, f.map, kSpec, cfg)
              .total;
      const double fd = (cp - cm) / (2 * step);
      worst = std::max(worst, std::abs(gflat[i] - fd) /
                                  std::max(1e-6, std::abs(fd)));
    }
    CHECK(worst <= 1e-5);
  }

  SUBCASE("doubling Lambda doubles the regularization contribution") {
    Fixture f(55, 300);
    PGNNParams p = f.zero_nn_model((f.lip.theta * 1.2).eval());
    TrainingConfig c0 = f.cfg, c1 = f.cfg, c2 = f.cfg;
    c0.lambda_diag = Vec::Zero(4);
    c1.lambda_diag = Vec::Constant(4, 0.01);
    c2.lambda_diag = Vec::Constant(4, 0.02);
    const Vec g0 = cost_gradient(p, f.data, f.map, kSpec, c0).theta_phy;
    const Vec g1 = cost_gradient(p, f.data, f.map, kSpec, c1).theta_phy;
    const Vec g2 = cost_gradient(p, f.data, f.map, kSpec, c2).theta_phy;
    CHECK(rel_err((g2 - g0).eval(), (2.0 * (g1 - g0)).eval()) <= 1e-12);
  }
}

TEST_CASE("init_output_layer") {
  SUBCASE("huge Lambda pins theta_phy to the anchor and fits the residual") {
    Fixture f(56, 1000);
    TrainingConfig cfg = f.cfg;
    cfg.lambda_diag = Vec::Constant(4, 1e12);
    const NNParams hidden = init_hidden_random({4, 16}, 9, 1.0);
    const PGNNParams p = init_output_layer(hidden, f.data, f.map, kSpec, cfg);
    CHECK(rel_err(p.theta_phy, f.lip.theta) <= 1e-4);

    // Sequential-fit oracle: least squares of [f_HL, 1] on the LIP residual.
    const DesignMatrices d = build_design(f.data, f.map, kSpec, cfg);
    const Mat h = hidden_output_batch(hidden, d.nn_in);
    Mat features(h.rows(), h.cols() + 1);
    features.leftCols(h.cols()) = h;
    features.col(h.cols()).setOnes();
    const Vec residual = d.u - d.basis * f.lip.theta;
    const Vec sol = (features.transpose() * features)
                        .ldlt()
                        .solve(features.transpose() * residual);
    CHECK(rel_err(p.nn.layers.back().W.transpose().col(0).eval(),
                  sol.head(h.cols()).eval()) <= 1e-3);
    CHECK(rel_err(p.nn.layers.back().B[0], sol[h.cols()]) <= 1e-3);
  }

  SUBCASE("solution minimizes the restricted cost (gradient at optimum)") {
    Fixture f(57, 800);
    const NNParams hidden = init_hidden_random({4, 16}, 21, 1.0);
    const PGNNParams p =
        init_output_layer(hidden, f.data, f.map, kSpec, f.cfg);
    const PgnnGradient g = cost_gradient(p, f.data, f.map, kSpec, f.cfg);
    // Restricted parameters: output layer and theta_phy.
    double norm2 = g.nn.layers.back().W.squaredNorm() +
                   g.nn.layers.back().B.squaredNorm() +
                   g.theta_phy.squaredNorm();
    const CostBreakdown c = regularized_cost(p, f.data, f.map, kSpec, f.cfg);
    CHECK(std::sqrt(norm2) <= 1e-8 * std::max(1.0, c.total));
  }

  SUBCASE("all-zero hidden features make M_R singular") {
    Fixture f(58, 500);
    const NNParams hidden = init_hidden_random({4, 16}, 9, 0.0);
    CHECK_THROWS_AS(init_output_layer(hidden, f.data, f.map, kSpec, f.cfg),
                    NumericalError);
  }
}

TEST_CASE("strict improvement condition") {
  SUBCASE("exactly LIP-generated data: no strict improvement") {
    Fixture f(59, 700, false);
    const NNParams hidden = init_hidden_random({4, 16}, 33, 1.0);
    const StrictImprovement s =
        strict_improvement_condition(hidden, f.data, f.map, kSpec, f.cfg);
    CHECK_FALSE(s.strict);

    const PGNNParams init =
        init_output_layer(hidden, f.data, f.map, kSpec, f.cfg);
    const double v_init =
        regularized_cost(init, f.data, f.map, kSpec, f.cfg).total;
    CHECK(std::abs(v_init - lip_mse(f)) <= 1e-10 * std::max(1.0, lip_mse(f)));
  }

  SUBCASE("generic hidden init on data with g: strict improvement") {
    Fixture f(60, 700, true);
    const NNParams hidden = init_hidden_random({4, 16}, 33, 1.0);
    const StrictImprovement s =
        strict_improvement_condition(hidden, f.data, f.map, kSpec, f.cfg);
    CHECK(s.strict);

    const PGNNParams init =
        init_output_layer(hidden, f.data, f.map, kSpec, f.cfg);
    const double v_init =
        regularized_cost(init, f.data, f.map, kSpec, f.cfg).total;
    CHECK(v_init < lip_mse(f));
  }
}

TEST_CASE("train") {
  SUBCASE("max_iterations = 0 is rejected") {
    Fixture f(61, 300);
    TrainingConfig cfg = f.cfg;
    cfg.optimizer.max_iterations = 0;
    CHECK_THROWS_AS(train(f.data, f.map, kSpec, cfg), ConfigError);
  }

  SUBCASE("max_iterations = 1 returns the initialization itself") {
    Fixture f(62, 300);
    TrainingConfig cfg = f.cfg;
    cfg.optimizer.max_iterations = 1;
    const TrainResult res = train(f.data, f.map, kSpec, cfg);
    CHECK(res.history.records.size() == 1);
    CHECK(res.history.best_iteration == 0);

    TrainingConfig icfg = cfg;
    icfg.input_scaling = res.input_scaling;
    const PGNNParams init = init_output_layer(
        init_hidden_random({4, 16}, cfg.seed, cfg.init_scale), f.data, f.map,
        kSpec, icfg);
    CHECK(flatten_params(res.params) == flatten_params(init));
  }

  SUBCASE("cost chain: returned <= initialization <= LIP, strict with g") {
    Fixture f(63, 900, true);
    TrainingConfig cfg = f.cfg;
    cfg.optimizer.max_iterations = 120;
    const TrainResult res = train(f.data, f.map, kSpec, cfg);
    const double v_init = res.history.records.front().total;
    const double v_best =
        res.history.records[res.history.best_iteration].total;
    CHECK(v_best <= v_init);
    CHECK(v_init <= lip_mse(f) * (1.0 + 1e-12));
    const StrictImprovement s = strict_improvement_condition(
        init_hidden_random({4, 16}, cfg.seed, cfg.init_scale), f.data, f.map,
        kSpec, cfg);
    if (s.strict) CHECK(v_init < lip_mse(f));
  }

  SUBCASE("best iteration attains the minimum recorded cost") {
    Fixture f(64, 500);
    TrainingConfig cfg = f.cfg;
    cfg.optimizer.max_iterations = 80;
    const TrainResult res = train(f.data, f.map, kSpec, cfg);
    double vmin = res.history.records.front().total;
    for (const auto& rec : res.history.records) vmin = std::min(vmin, rec.total);
    CHECK(res.history.records[res.history.best_iteration].total == vmin);
  }

  SUBCASE("bitwise deterministic in config and seed") {
    Fixture f(65, 400);
    TrainingConfig cfg = f.cfg;
    cfg.optimizer.max_iterations = 40;
    const TrainResult a = train(f.data, f.map, kSpec, cfg);
    const TrainResult b = train(f.data, f.map, kSpec, cfg);
    REQUIRE(a.history.records.size() == b.history.records.size());
    for (std::size_t i = 0; i < a.history.records.size(); ++i) {
      CHECK(a.history.records[i].total == b.history.records[i].total);
      CHECK(a.history.records[i].theta_phy == b.history.records[i].theta_phy);
    }
    CHECK(flatten_params(a.params) == flatten_params(b.params));
  }

  SUBCASE("sequential mode freezes theta_phy at the anchor") {
    Fixture f(66, 500);
    TrainingConfig cfg = f.cfg;
    cfg.mode = TrainMode::Sequential;
    cfg.optimizer.max_iterations = 30;
    const TrainResult res = train(f.data, f.map, kSpec, cfg);
    for (const auto& rec : res.history.records)
      CHECK(rec.theta_phy == f.lip.theta);
    CHECK(res.params.theta_phy == f.lip.theta);
  }

  SUBCASE("pinn baseline freezes theta_phy and reports the penalty") {
    Fixture f(67, 500);
    TrainingConfig cfg = f.cfg;
    cfg.mode = TrainMode::PinnBaseline;
    cfg.pinn_lambda = 0.2;
    cfg.optimizer.max_iterations = 30;
    const TrainResult res = train(f.data, f.map, kSpec, cfg);
    CHECK(res.params.theta_phy == f.lip.theta);
    const CostBreakdown c = pinn_cost(res.params, f.data, f.map, kSpec, cfg);
    const auto& best = res.history.records[res.history.best_iteration];
    CHECK(rel_err(best.total, c.total) <= 1e-12);
  }
}

TEST_CASE("input scaling resolves to unit max-abs features") {
  Fixture f(68, 400);
  const DesignMatrices d = build_design(f.data, f.map, kSpec, f.cfg);
  for (long j = 0; j < d.nn_in.cols(); ++j) {
    const double m = d.nn_in.col(j).cwiseAbs().maxCoeff();
    CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
  }
}
