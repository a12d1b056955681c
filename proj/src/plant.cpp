#include "pgnnff/plant.hpp"

#include <cmath>

namespace pgnnff {

GSpec GSpec::none() { return GSpec{}; }

GSpec GSpec::sin_tanh(double a, double p, double b, double v0) {
  GSpec g;
  g.kind = Kind::SinTanh;
  g.a = a;
  g.p = p;
  g.b = b;
  g.v0 = v0;
  return g;
}

GSpec GSpec::tanh_net(std::uint64_t seed, int neurons, double y_scale,
                      double v_scale, double out_scale) {
  GSpec g;
  g.kind = Kind::TanhNet;
  Rng rng = Rng::derive(seed, /*stream=*/0x475350454355ULL);
  NNLayer h;
  h.W.resize(neurons, 2);
  h.B.resize(neurons);
  for (int i = 0; i < neurons; ++i) {
    h.W(i, 0) = rng.uniform(-1.5, 1.5) / y_scale;
    h.W(i, 1) = rng.uniform(-1.5, 1.5) / v_scale;
    h.B[i] = rng.uniform(-1.0, 1.0);
  }
  NNLayer out;
  out.W.resize(1, neurons);
  for (int i = 0; i < neurons; ++i)
    out.W(0, i) = rng.uniform(-1.0, 1.0) * out_scale /
                  std::sqrt(static_cast<double>(neurons));
  out.B = Vec::Zero(1);
  g.net.layers = {std::move(h), std::move(out)};
  g.net.activation = Activation::Tanh;
  return g;
}

PidGains PidGains::for_mass(double m) {
  PidGains g;
  const double wn = 2.0 * M_PI * 50.0;
  g.kp = m * wn * wn;
  g.kd = 2.0 * 0.7 * m * wn;
  g.ki = g.kp * 2.0 * M_PI * 5.0;
  return g;
}

Vec PlantConfig::theta0() const {
  Vec t(4);
  t << m, fv, fc, fk;
  return t;
}

void PlantConfig::validate() const {
  if (!(m > 0.0)) throw ConfigError("plant: mass m must be > 0");
  if (!(ts > 0.0)) throw ConfigError("plant: ts must be > 0");
  if (fv < 0.0 || fc < 0.0 || fk < 0.0)
    throw ConfigError("plant: friction/stiffness coefficients must be >= 0");
  if (encoder_resolution < 0.0)
    throw ConfigError("plant: encoder_resolution must be >= 0");
  if (dither_sigma < 0.0) throw ConfigError("plant: dither_sigma must be >= 0");
}

SimState SimState::init(const PlantConfig& cfg, double y0) {
  SimState s;
  s.y_prev = y0;
  s.y_prev2 = y0;
  s.rng = Rng::derive(cfg.seed, /*stream=*/0x444954484552ULL);
  return s;
}

double g_true(const PlantConfig& cfg, double y, double v) {
  switch (cfg.g.kind) {
    case GSpec::Kind::None:
      return 0.0;
    case GSpec::Kind::SinTanh:
      return cfg.g.a * std::sin(2.0 * M_PI * y / cfg.g.p) +
             cfg.g.b * std::tanh(v / cfg.g.v0);
    case GSpec::Kind::TanhNet: {
      Vec in(2);
      in << y, v;
      return nn_forward(cfg.g.net, in);
    }
  }
  return 0.0;
}

double plant_step(SimState& state, double u_total, const PlantConfig& cfg) {
  const double ts = cfg.ts;
  const double v_hat = (state.y_prev - state.y_prev2) / ts;
  const double d = cfg.m / (ts * ts) + cfg.fv / ts + cfg.fk;
  const double base = u_total - g_true(cfg, state.y_prev, v_hat) +
                      (cfg.m / (ts * ts)) * (2.0 * state.y_prev - state.y_prev2) +
                      (cfg.fv / ts) * state.y_prev;

  double y;
  if (cfg.fc == 0.0) {
    y = base / d;
  } else {
    const double y_pos = (base - cfg.fc) / d;  // assumes forward motion
    const double y_neg = (base + cfg.fc) / d;  // assumes backward motion
    if (y_pos > state.y_prev)
      y = y_pos;
    else if (y_neg < state.y_prev)
      y = y_neg;
    else
      y = state.y_prev;  // stick: static friction holds the carriage
  }

  if (!std::isfinite(y) || std::abs(y) > 10.0)
    throw NumericalError("plant_step: trajectory diverged (|y| = " +
                         std::to_string(std::abs(y)) + " m)");
  state.y_prev2 = state.y_prev;
  state.y_prev = y;
  return y;
}

double feedback_control(SimState& state, double r, double y_meas,
                        const PlantConfig& cfg) {
  const PidGains& g = cfg.controller;
  const double e = r - y_meas;
  state.integ += e * cfg.ts;
  if (g.ki > 0.0) {
    const double lim = g.integrator_limit / g.ki;
    if (state.integ > lim) state.integ = lim;
    if (state.integ < -lim) state.integ = -lim;
  }
  const double d_raw = (e - state.e_prev) / cfg.ts;
  state.e_prev = e;
  const double alpha = cfg.ts / (cfg.ts + g.deriv_tau);
  state.d_filt += alpha * (d_raw - state.d_filt);
  return g.kp * e + g.ki * state.integ + g.kd * state.d_filt;
}

double quantize(double y, double resolution) {
  if (resolution <= 0.0) return y;
  return std::round(y / resolution) * resolution;
}

ClosedLoopResult run_closed_loop(const ReferenceProfile& reference,
                                 const std::vector<double>* feedforward,
                                 const PlantConfig& cfg, bool dither) {
  cfg.validate();
  const long n = reference.size();
  if (n < 1) throw ConfigError("run_closed_loop: empty reference");
  if (feedforward && static_cast<long>(feedforward->size()) != n)
    throw ConfigError("run_closed_loop: feedforward/reference length mismatch");

  ClosedLoopResult out;
  out.data.ts = cfg.ts;
  out.data.u.reserve(n);
  out.data.y.reserve(n);
  out.tracking.e.reserve(n);
  out.tracking.reference_id = reference.id;

  SimState st = SimState::init(cfg, reference.r[0]);
  for (long t = 0; t < n; ++t) {
    const double r_delayed = t > 0 ? reference.r[t - 1] : reference.r[0];
    const double y_meas = quantize(st.y_prev, cfg.encoder_resolution);
    double u = feedback_control(st, r_delayed, y_meas, cfg);
    if (feedforward) u += (*feedforward)[t];
    if (dither && cfg.dither_sigma > 0.0)
      u += cfg.dither_sigma * st.rng.gaussian();
    const double y = plant_step(st, u, cfg);
    out.data.u.push_back(u);
    out.data.y.push_back(quantize(y, cfg.encoder_resolution));
    out.tracking.e.push_back(reference.r[t] - y);
  }
  out.tracking.mae = mae(out.tracking.e);
  return out;
}

}  // namespace pgnnff
