#pragma once

#include <string>
#include <vector>

namespace pgnnff {

struct MotionBounds {
  double vmax = 0.05;   // m/s
  double amax = 4.0;    // m/s^2
  double jmax = 1000.0; // m/s^3
};

/// Sampled third-order (jerk-limited) position reference.
struct ReferenceProfile {
  std::vector<double> r;  // meters
  double ts = 1e-4;
  MotionBounds bounds;
  std::string id;

  long size() const { return static_cast<long>(r.size()); }
};

/// Seven-segment S-curve point-to-point move sampled at ts, reaching `end`
/// exactly, followed by `dwell` seconds of hold. Short moves degenerate to
/// triangular acceleration/velocity phases; never an error for finite
/// distances.
ReferenceProfile make_point_to_point(double start, double end,
                                     const MotionBounds& bounds, double ts,
                                     double dwell);

/// Appends `next` to `base` (continuing from base's final sample).
void append_profile(ReferenceProfile& base, const ReferenceProfile& next);

struct DerivativeReport {
  double vmax_obs = 0.0;
  double amax_obs = 0.0;
  double jmax_obs = 0.0;
};

/// Maxima of backward-difference velocity/acceleration/jerk estimates.
DerivativeReport discrete_derivative_check(const ReferenceProfile& profile);

/// Back-and-forth presets. r1: 4 full strokes between -0.1 and 0.1 m with
/// 0.2 s dwell between strokes; r2: the same scheme between 0 and 0.17 m.
/// Both use bounds (0.05 m/s, 4 m/s^2, 1000 m/s^3).
ReferenceProfile make_r1(double ts, int strokes = 4, double dwell = 0.2);
ReferenceProfile make_r2(double ts, int strokes = 4, double dwell = 0.2);

}  // namespace pgnnff
