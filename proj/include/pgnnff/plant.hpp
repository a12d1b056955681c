#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgnnff/nn.hpp"
#include "pgnnff/rng.hpp"
#include "pgnnff/tracking.hpp"
#include "pgnnff/trajectory.hpp"
#include "pgnnff/types.hpp"

namespace pgnnff {

/// Synthetic unknown dynamics g. The real plant's g is unknown; these
/// stand-ins are identifiable, clearly non-LIP, and within actuator scale.
struct GSpec {
  enum class Kind { None, SinTanh, TanhNet };
  Kind kind = Kind::None;

  // SinTanh: g = A sin(2 pi y / P) + B tanh(v / v0)
  double a = 5.0;    // N
  double p = 0.025;  // m
  double b = 2.0;    // N
  double v0 = 0.01;  // m/s

  // TanhNet: g = single-hidden-layer tanh net evaluated on raw (y, v)
  NNParams net;

  static GSpec none();
  static GSpec sin_tanh(double a = 5.0, double p = 0.025, double b = 2.0,
                        double v0 = 0.01);
  /// Fixed random tanh network on (y, v), input normalization folded into
  /// the first layer, output scaled to roughly out_scale Newtons.
  static GSpec tanh_net(std::uint64_t seed, int neurons = 16,
                        double y_scale = 0.1, double v_scale = 0.05,
                        double out_scale = 1.5);
};

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integrator_limit = 1000.0;  // clamp on the integral action [N]
  double deriv_tau = 7.96e-4;        // derivative low-pass time constant [s]

  /// Gains for ~50 Hz closed-loop bandwidth on mass m:
  /// kp = m (2 pi 50)^2, kd = 2*0.7*m*(2 pi 50), ki = kp * 2 pi 5.
  static PidGains for_mass(double m);
};

struct PlantConfig {
  double m = 18.8;     // kg
  double fv = 172.0;   // N s/m
  double fc = 7.21;    // N
  double fk = 1.36e-8; // N/m
  GSpec g;
  double ts = 1e-4;
  double encoder_resolution = 0.5e-5;  // m; 0 disables quantization
  double dither_sigma = 50.0;          // N
  PidGains controller = PidGains::for_mass(18.8);
  std::uint64_t seed = 1;

  Vec theta0() const;
  void validate() const;
};

struct SimState {
  double y_prev = 0.0;
  double y_prev2 = 0.0;
  double integ = 0.0;   // PID integrator state
  double e_prev = 0.0;
  double d_filt = 0.0;  // filtered error derivative
  Rng rng{0};

  static SimState init(const PlantConfig& cfg, double y0);
};

double g_true(const PlantConfig& cfg, double y, double v);

/// Advances the discrete CLM one sample under total force u_total.
///
/// The backward-Euler inverse dynamics are solved for y(t) with the mass,
/// viscous, and stiffness rows taken at the current sample (the same stencil
/// the identification basis uses) and the Coulomb sign consistent with the
/// realized velocity: of the two sign candidates at most one yields a
/// velocity matching its sign; when neither does, the carriage sticks
/// (y(t) = y(t-1)), which is exactly the static-friction condition
/// |u - f_k y - g| <= f_c. g is evaluated at the previous sample so the
/// update stays explicit.
double plant_step(SimState& state, double u_total, const PlantConfig& cfg);

/// Discrete PID on e = r - y_meas with integrator clamping and a first-order
/// low-pass on the derivative (raw differentiation of a quantized encoder
/// signal would inject ~kd*res/Ts force kicks).
double feedback_control(SimState& state, double r, double y_meas,
                        const PlantConfig& cfg);

double quantize(double y, double resolution);

struct ClosedLoopResult {
  Dataset data;            // logged (u_total, quantized y)
  TrackingResult tracking; // e(t) = r(t) - true y(t)
};

/// Closed-loop run over a reference, optionally adding a feedforward
/// sequence and Gaussian dither to the applied force. The controller runs
/// with one sample of computational delay (it compares r(t-1) against the
/// measured y(t-1)), so an exact inverse feedforward keeps the loop quiet.
ClosedLoopResult run_closed_loop(const ReferenceProfile& reference,
                                 const std::vector<double>* feedforward,
                                 const PlantConfig& cfg, bool dither);

}  // namespace pgnnff
