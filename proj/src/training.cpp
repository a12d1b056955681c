#include "pgnnff/training.hpp"

#include <cmath>
#include <limits>

#include "pgnnff/linalg.hpp"

namespace pgnnff {

TrainMode train_mode_from_string(const std::string& s) {
  if (s == "regularized") return TrainMode::Regularized;
  if (s == "unregularized") return TrainMode::Unregularized;
  if (s == "sequential") return TrainMode::Sequential;
  if (s == "pinn_baseline") return TrainMode::PinnBaseline;
  throw ConfigError("unknown training mode: '" + s + "'");
}

std::string to_string(TrainMode m) {
  switch (m) {
    case TrainMode::Regularized: return "regularized";
    case TrainMode::Unregularized: return "unregularized";
    case TrainMode::Sequential: return "sequential";
    case TrainMode::PinnBaseline: return "pinn_baseline";
  }
  return "?";
}

void TrainingConfig::validate(int basis_dim) const {
  if (optimizer.max_iterations < 1)
    throw ConfigError("optimizer.max_iterations must be >= 1");
  if (!(optimizer.step_size > 0.0))
    throw ConfigError("optimizer.step_size must be > 0");
  if (lambda_diag.size() != 0 && lambda_diag.size() != basis_dim)
    throw ConfigError("lambda_diag length must match the basis dimension");
  for (long i = 0; i < lambda_diag.size(); ++i)
    if (lambda_diag[i] < 0.0)
      throw ConfigError("lambda_diag entries must be >= 0");
  if (pinn_lambda < 0.0) throw ConfigError("pinn_lambda must be >= 0");
  if (hidden_widths.empty())
    throw ConfigError("hidden_widths must name at least one hidden layer");
  for (int w : hidden_widths)
    if (w < 1) throw ConfigError("hidden widths must be >= 1");
  if (theta_lip_ref.theta.size() != 0 &&
      theta_lip_ref.theta.size() != basis_dim)
    throw ConfigError("theta_lip_ref length must match the basis dimension");
}

namespace {

Vec lambda_or_zero(const TrainingConfig& cfg, int n) {
  if (cfg.lambda_diag.size() == 0) return Vec::Zero(n);
  return cfg.lambda_diag;
}

Vec anchor_or_throw(const TrainingConfig& cfg, int n) {
  if (cfg.theta_lip_ref.theta.size() != n)
    throw ConfigError(
        "theta_lip_ref (the LIP anchor) must be provided with length " +
        std::to_string(n));
  return cfg.theta_lip_ref.theta;
}

long resolve_stride(long valid_count, long max_rows) {
  if (max_rows <= 0 || valid_count <= max_rows) return 1;
  return (valid_count + max_rows - 1) / max_rows;
}

}  // namespace

DesignMatrices build_design(const Dataset& data, const BasisMap& map,
                            const RegressorSpec& spec,
                            const TrainingConfig& cfg) {
  const SampleRange r = valid_sample_range(spec, data.size());
  DesignMatrices d;
  d.stride = resolve_stride(r.count(), cfg.max_rows);
  d.basis = basis_matrix(data, map, spec, d.stride);
  d.u = input_vector(data, spec, d.stride);
  if (cfg.input_scaling.size() != 0) {
    if (cfg.input_scaling.size() != map.n_out)
      throw ConfigError("input_scaling length must match the basis dimension");
    d.scaling = cfg.input_scaling;
  } else {
    // Unit max-abs per transformed input on the training rows.
    d.scaling = Vec::Ones(map.n_out);
    for (long j = 0; j < d.basis.cols(); ++j) {
      const double m = d.basis.col(j).cwiseAbs().maxCoeff();
      d.scaling[j] = m > 0.0 ? 1.0 / m : 1.0;
    }
  }
  d.nn_in = d.basis * d.scaling.asDiagonal();
  return d;
}

double pgnn_predict(const PGNNParams& model, const BasisMap& map,
                    const Vec& input_scaling, const Regressor& phi) {
  const Vec features = eval_basis(map, phi);
  if (model.theta_phy.size() != features.size())
    throw NumericalError("pgnn_predict: theta_phy/basis dimension mismatch");
  if (input_scaling.size() != features.size())
    throw NumericalError("pgnn_predict: input_scaling dimension mismatch");
  const Vec x = features.cwiseProduct(input_scaling);
  return nn_forward(model.nn, x) + model.theta_phy.dot(features);
}

double mse_cost(const std::function<double(const Regressor&)>& predictor,
                const Dataset& data, const RegressorSpec& spec) {
  const SampleRange r = valid_sample_range(spec, data.size());
  double acc = 0.0;
  for (long t = r.t_min; t <= r.t_max; ++t) {
    const double e = data.u[t] - predictor(build_regressor(data, t, spec));
    acc += e * e;
  }
  return acc / static_cast<double>(r.count());
}

namespace {

// Forward pass plus (optionally) the cost gradient, on precomputed design
// matrices. One code path serves all training modes.
struct Evaluation {
  CostBreakdown cost;
  Vec grad;  // same layout as flatten_params; empty when not requested
};

struct Workspace {
  std::vector<Mat> act;  // act[0] = inputs, act[i] = hidden activations
};

Evaluation evaluate(const PGNNParams& p, const DesignMatrices& d,
                    const TrainingConfig& cfg, bool with_grad,
                    Workspace& ws) {
  const long nv = d.u.size();
  const int n0 = static_cast<int>(d.basis.cols());
  const Vec lambda = lambda_or_zero(cfg, n0);
  const Vec anchor = anchor_or_throw(cfg, n0);
  const std::size_t l = p.nn.layers.size() - 1;

  ws.act.resize(l + 1);
  ws.act[0] = d.nn_in;
  for (std::size_t i = 0; i < l; ++i) {
    ws.act[i + 1] = ((ws.act[i] * p.nn.layers[i].W.transpose()).rowwise() +
                     p.nn.layers[i].B.transpose());
    if (p.nn.activation == Activation::Tanh)
      ws.act[i + 1] = ws.act[i + 1].array().tanh().matrix();
  }
  const auto& out = p.nn.layers[l];
  const Vec nn_out = (ws.act[l] * out.W.transpose()).col(0).array() + out.B(0);

  Evaluation ev;
  Vec dout(nv);  // d cost / d nn_out
  const bool pinn = cfg.mode == TrainMode::PinnBaseline;
  if (pinn) {
    const Vec phys = d.basis * p.theta_phy;
    const Vec r1 = nn_out - d.u;
    const Vec r2 = nn_out - phys;
    ev.cost.data_fit = r1.squaredNorm() / static_cast<double>(nv);
    ev.cost.reg_term = cfg.pinn_lambda * r2.squaredNorm() / static_cast<double>(nv);
    ev.cost.total = ev.cost.data_fit + ev.cost.reg_term;
    if (with_grad)
      dout = (2.0 / static_cast<double>(nv)) * (r1 + cfg.pinn_lambda * r2);
  } else {
    const Vec pred = nn_out + d.basis * p.theta_phy;
    const Vec r = pred - d.u;
    ev.cost.data_fit = r.squaredNorm() / static_cast<double>(nv);
    const Vec dphy = p.theta_phy - anchor;
    ev.cost.reg_term = dphy.dot(lambda.cwiseProduct(dphy));
    ev.cost.total = ev.cost.data_fit + ev.cost.reg_term;
    if (with_grad) dout = (2.0 / static_cast<double>(nv)) * r;
  }
  if (!with_grad) return ev;

  const bool freeze_phy =
      cfg.mode == TrainMode::Sequential || cfg.mode == TrainMode::PinnBaseline;

  PgnnGradient g;
  g.nn.layers.resize(p.nn.layers.size());
  g.nn.layers[l].W = (dout.transpose() * ws.act[l]);
  g.nn.layers[l].B = Vec::Constant(1, dout.sum());

  Mat gz = dout * out.W;  // N x n_l, d cost / d z_l pre-activation-derivative
  for (std::size_t i = l; i-- > 0;) {
    if (p.nn.activation == Activation::Tanh)
      gz = gz.cwiseProduct(Mat::Ones(gz.rows(), gz.cols()) -
                           ws.act[i + 1].cwiseProduct(ws.act[i + 1]));
    g.nn.layers[i].W = gz.transpose() * ws.act[i];
    g.nn.layers[i].B = gz.colwise().sum().transpose();
    if (i > 0) gz = gz * p.nn.layers[i].W;
  }

  if (freeze_phy) {
    g.theta_phy = Vec::Zero(n0);
  } else {
    g.theta_phy = d.basis.transpose() * dout +
                  2.0 * lambda.cwiseProduct(p.theta_phy - anchor);
  }

  PGNNParams shaped;
  shaped.nn.layers = std::move(g.nn.layers);
  shaped.nn.activation = p.nn.activation;
  shaped.theta_phy = std::move(g.theta_phy);
  ev.grad = flatten_params(shaped);
  return ev;
}

CostBreakdown cost_on_design(const PGNNParams& p, const DesignMatrices& d,
                             const TrainingConfig& cfg) {
  Workspace ws;
  return evaluate(p, d, cfg, /*with_grad=*/false, ws).cost;
}

}  // namespace

CostBreakdown regularized_cost(const PGNNParams& model, const Dataset& data,
                               const BasisMap& map, const RegressorSpec& spec,
                               const TrainingConfig& cfg) {
  TrainingConfig c = cfg;
  if (c.mode == TrainMode::PinnBaseline) c.mode = TrainMode::Regularized;
  return cost_on_design(model, build_design(data, map, spec, c), c);
}

CostBreakdown pinn_cost(const PGNNParams& model, const Dataset& data,
                        const BasisMap& map, const RegressorSpec& spec,
                        const TrainingConfig& cfg) {
  TrainingConfig c = cfg;
  c.mode = TrainMode::PinnBaseline;
  return cost_on_design(model, build_design(data, map, spec, c), c);
}

PgnnGradient cost_gradient(const PGNNParams& model, const Dataset& data,
                           const BasisMap& map, const RegressorSpec& spec,
                           const TrainingConfig& cfg) {
  const DesignMatrices d = build_design(data, map, spec, cfg);
  Workspace ws;
  const Evaluation ev = evaluate(model, d, cfg, /*with_grad=*/true, ws);
  PGNNParams shaped = unflatten_params(ev.grad, model);
  PgnnGradient g;
  g.nn.layers = std::move(shaped.nn.layers);
  g.theta_phy = std::move(shaped.theta_phy);
  return g;
}

namespace {

struct OutputLayerSystem {
  Mat m_r;
  Vec rhs;
  Vec anchor_padded;  // [0; 0; theta_LIP]
};

OutputLayerSystem output_layer_system(const NNParams& hidden,
                                      const DesignMatrices& d,
                                      const TrainingConfig& cfg) {
  const long nv = d.u.size();
  const int n0 = static_cast<int>(d.basis.cols());
  const int nl = hidden.last_hidden_width();
  const Vec lambda = lambda_or_zero(cfg, n0);
  const Vec anchor = anchor_or_throw(cfg, n0);

  Mat phi_ol(nv, nl + 1 + n0);
  phi_ol.leftCols(nl) = hidden_output_batch(hidden, d.nn_in);
  phi_ol.col(nl).setOnes();
  phi_ol.rightCols(n0) = d.basis;

  OutputLayerSystem sys;
  sys.m_r = (phi_ol.transpose() * phi_ol) / static_cast<double>(nv);
  sys.m_r.bottomRightCorner(n0, n0) += Mat(lambda.asDiagonal());
  sys.m_r = (0.5 * (sys.m_r + sys.m_r.transpose())).eval();
  sys.rhs = (phi_ol.transpose() * d.u) / static_cast<double>(nv);
  sys.rhs.tail(n0) += lambda.cwiseProduct(anchor);
  sys.anchor_padded = Vec::Zero(nl + 1 + n0);
  sys.anchor_padded.tail(n0) = anchor;
  return sys;
}

PGNNParams assemble_from_output_solution(const NNParams& hidden,
                                         const Vec& theta_ol, int n0) {
  const int nl = hidden.last_hidden_width();
  PGNNParams p;
  p.nn = hidden;
  auto& out = p.nn.layers.back();
  out.W = theta_ol.head(nl).transpose();
  out.B = Vec::Constant(1, theta_ol[nl]);
  p.theta_phy = theta_ol.tail(n0);
  return p;
}

}  // namespace

PGNNParams init_output_layer(const NNParams& hidden, const Dataset& data,
                             const BasisMap& map, const RegressorSpec& spec,
                             const TrainingConfig& cfg) {
  const DesignMatrices d = build_design(data, map, spec, cfg);
  const OutputLayerSystem sys = output_layer_system(hidden, d, cfg);
  const Vec theta_ol =
      solve_spd(sys.m_r, sys.rhs, 1e-12, "init_output_layer (M_R)");
  return assemble_from_output_solution(hidden, theta_ol,
                                       static_cast<int>(d.basis.cols()));
}

StrictImprovement strict_improvement_condition(const NNParams& hidden,
                                               const Dataset& data,
                                               const BasisMap& map,
                                               const RegressorSpec& spec,
                                               const TrainingConfig& cfg) {
  const DesignMatrices d = build_design(data, map, spec, cfg);
  const OutputLayerSystem sys = output_layer_system(hidden, d, cfg);
  const Vec lhs = sys.m_r * sys.anchor_padded;
  StrictImprovement s;
  s.residual_norm = (lhs - sys.rhs).norm();
  s.scale = std::max(lhs.norm(), sys.rhs.norm());
  s.strict = s.residual_norm > 1e-10 * s.scale;
  return s;
}

Vec flatten_params(const PGNNParams& p) {
  long n = p.theta_phy.size();
  for (const auto& l : p.nn.layers) n += l.W.size() + l.B.size();
  Vec flat(n);
  long k = 0;
  for (const auto& l : p.nn.layers) {
    for (long r = 0; r < l.W.rows(); ++r)
      for (long c = 0; c < l.W.cols(); ++c) flat[k++] = l.W(r, c);
    for (long r = 0; r < l.B.size(); ++r) flat[k++] = l.B[r];
  }
  flat.tail(p.theta_phy.size()) = p.theta_phy;
  return flat;
}

PGNNParams unflatten_params(const Vec& flat, const PGNNParams& shape) {
  PGNNParams p = shape;
  long k = 0;
  for (auto& l : p.nn.layers) {
    for (long r = 0; r < l.W.rows(); ++r)
      for (long c = 0; c < l.W.cols(); ++c) l.W(r, c) = flat[k++];
    for (long r = 0; r < l.B.size(); ++r) l.B[r] = flat[k++];
  }
  p.theta_phy = flat.tail(p.theta_phy.size());
  return p;
}

namespace {

// Plain least-squares output layer for the frozen-theta_phy modes: fits
// [f_HL, 1] to `target` (sequential: LIP residual; PINN: blended target).
PGNNParams init_output_layer_frozen(const NNParams& hidden,
                                    const DesignMatrices& d, const Vec& target,
                                    double weight, const Vec& theta_phy) {
  const long nv = d.u.size();
  const int nl = hidden.last_hidden_width();
  Mat f(nv, nl + 1);
  f.leftCols(nl) = hidden_output_batch(hidden, d.nn_in);
  f.col(nl).setOnes();
  const Mat m = (weight * (f.transpose() * f) / static_cast<double>(nv));
  const Vec b = (f.transpose() * target) / static_cast<double>(nv);
  const Vec sol = solve_spd(m, b, 1e-12, "output layer least squares");
  PGNNParams p;
  p.nn = hidden;
  p.nn.layers.back().W = sol.head(nl).transpose();
  p.nn.layers.back().B = Vec::Constant(1, sol[nl]);
  p.theta_phy = theta_phy;
  return p;
}

}  // namespace

TrainResult train(const Dataset& data, const BasisMap& map,
                  const RegressorSpec& spec, const TrainingConfig& cfg_in) {
  TrainingConfig cfg = cfg_in;
  cfg.validate(map.n_out);
  if (cfg.mode == TrainMode::Unregularized)
    cfg.lambda_diag = Vec::Zero(map.n_out);

  const DesignMatrices d = build_design(data, map, spec, cfg);
  TrainingConfig run_cfg = cfg;
  run_cfg.input_scaling = d.scaling;  // pin the resolved scaling

  const Vec anchor = anchor_or_throw(cfg, map.n_out);
  std::vector<int> widths;
  widths.push_back(map.n_out);
  widths.insert(widths.end(), cfg.hidden_widths.begin(),
                cfg.hidden_widths.end());
  const NNParams hidden =
      init_hidden_random(widths, cfg.seed, cfg.init_scale);

  PGNNParams params;
  switch (cfg.mode) {
    case TrainMode::Regularized:
    case TrainMode::Unregularized: {
      const OutputLayerSystem sys = output_layer_system(hidden, d, run_cfg);
      const Vec theta_ol = solve_spd(sys.m_r, sys.rhs, 1e-12, "train init");
      params = assemble_from_output_solution(hidden, theta_ol, map.n_out);
      break;
    }
    case TrainMode::Sequential: {
      const Vec residual = d.u - d.basis * anchor;
      params = init_output_layer_frozen(hidden, d, residual, 1.0, anchor);
      break;
    }
    case TrainMode::PinnBaseline: {
      const Vec blended =
          (d.u + cfg.pinn_lambda * (d.basis * anchor)).eval();
      params = init_output_layer_frozen(hidden, d, blended,
                                        1.0 + cfg.pinn_lambda, anchor);
      break;
    }
  }

  // Full-batch Adam with per-iteration cost recording and best-iterate
  // selection. Iteration k records V(theta^(k)); updates happen between
  // records, so max_iterations = 1 returns the initialization itself.
  Vec theta = flatten_params(params);
  Vec m = Vec::Zero(theta.size());
  Vec v = Vec::Zero(theta.size());
  double step = cfg.optimizer.step_size;

  TrainResult result;
  result.input_scaling = d.scaling;
  result.stride = d.stride;
  result.history.records.reserve(cfg.optimizer.max_iterations);

  double best_cost = std::numeric_limits<double>::infinity();
  Vec best_theta = theta;
  long best_iter = 0;
  Workspace ws;

  for (long k = 0; k < cfg.optimizer.max_iterations; ++k) {
    const bool last = (k == cfg.optimizer.max_iterations - 1);
    const PGNNParams current = unflatten_params(theta, params);
    const Evaluation ev = evaluate(current, d, run_cfg, !last, ws);
    if (!std::isfinite(ev.cost.total))
      throw NumericalError("train: non-finite cost at iteration " +
                           std::to_string(k) + " (mode " +
                           to_string(cfg.mode) + ", step size " +
                           std::to_string(cfg.optimizer.step_size) + ")");

    IterationRecord rec;
    rec.iteration = k;
    rec.total = ev.cost.total;
    rec.data_fit = ev.cost.data_fit;
    rec.reg_term = ev.cost.reg_term;
    rec.theta_phy = current.theta_phy;
    result.history.records.push_back(std::move(rec));

    if (ev.cost.total < best_cost) {
      best_cost = ev.cost.total;
      best_theta = theta;
      best_iter = k;
    }
    if (last) break;

    if (cfg.optimizer.tolerance > 0.0 && k > 0) {
      const double prev = result.history.records[k - 1].total;
      if (std::abs(prev - ev.cost.total) <=
          cfg.optimizer.tolerance * std::abs(prev))
        break;
    }

    const double b1k = 1.0 - std::pow(cfg.optimizer.beta1, k + 1);
    const double b2k = 1.0 - std::pow(cfg.optimizer.beta2, k + 1);
    m = cfg.optimizer.beta1 * m + (1.0 - cfg.optimizer.beta1) * ev.grad;
    v = cfg.optimizer.beta2 * v +
        (1.0 - cfg.optimizer.beta2) * ev.grad.cwiseProduct(ev.grad);
    const Vec denom =
        (v / b2k).cwiseSqrt() + Vec::Constant(theta.size(), cfg.optimizer.eps);
    theta -= step * (m / b1k).cwiseQuotient(denom);
    step *= cfg.optimizer.step_decay;
  }

  result.history.best_iteration = best_iter;
  result.params = unflatten_params(best_theta, params);
  return result;
}

}  // namespace pgnnff
