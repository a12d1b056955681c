#include "pgnnff/trajectory.hpp"

#include <cmath>

#include "pgnnff/types.hpp"

namespace pgnnff {

namespace {

struct Segment {
  double dur;
  double j;   // jerk
  double a0;  // state at segment start
  double v0;
  double p0;
};

double seg_pos(const Segment& s, double tau) {
  return s.p0 + s.v0 * tau + 0.5 * s.a0 * tau * tau +
         s.j * tau * tau * tau / 6.0;
}
double seg_vel(const Segment& s, double tau) {
  return s.v0 + s.a0 * tau + 0.5 * s.j * tau * tau;
}
double seg_acc(const Segment& s, double tau) { return s.a0 + s.j * tau; }

// Planning backoff: sampled positions are doubles, and their second/third
// differences carry representation noise of order eps*|r|/Ts^k (about 1e-4
// m/s^3 of jerk at 10 kHz and 0.1 m). Planning a hair inside the bounds
// keeps the discrete derivatives of the stored samples within the nominal
// bounds with < 1e-9 slack.
constexpr double kPlanBackoff = 1.0 - 1e-6;

/// Phase durations (t_j, t_a, t_v) of the symmetric seven-segment move of
/// length dist > 0, degenerating to triangular profiles for short moves.
void solve_phases(double dist, const MotionBounds& b, double& t_j,
                  double& t_a, double& t_v) {
  const double v = b.vmax, a = b.amax, j = b.jmax;
  t_j = a / j;
  if (j * t_j * t_j >= v) {  // velocity reached before full acceleration
    t_j = std::sqrt(v / j);
    t_a = 0.0;
  } else {
    t_a = v / a - t_j;
  }
  const double t_acc = 2.0 * t_j + t_a;
  const double vp = j * t_j * (t_j + t_a);
  t_v = dist / vp - t_acc;
  if (t_v >= 0.0) return;
  t_v = 0.0;
  // Cruise unreachable: shrink the constant-acceleration phase.
  t_j = a / j;
  const double disc = t_j * t_j + 4.0 * dist / a;
  t_a = 0.5 * (-3.0 * t_j + std::sqrt(disc));
  if (t_a >= 0.0) return;
  t_a = 0.0;
  // Even full acceleration unreachable: pure jerk triangle.
  t_j = std::cbrt(dist / (2.0 * j));
}

}  // namespace

ReferenceProfile make_point_to_point(double start, double end,
                                     const MotionBounds& bounds, double ts,
                                     double dwell) {
  if (!(bounds.vmax > 0.0) || !(bounds.amax > 0.0) || !(bounds.jmax > 0.0))
    throw ConfigError("trajectory bounds must be positive");
  if (!(ts > 0.0)) throw ConfigError("trajectory ts must be > 0");
  if (dwell < 0.0) throw ConfigError("dwell must be >= 0");

  ReferenceProfile prof;
  prof.ts = ts;
  prof.bounds = bounds;
  const long n_dwell = static_cast<long>(std::llround(dwell / ts));

  const double dist = std::abs(end - start);
  if (dist == 0.0) {
    prof.r.assign(static_cast<std::size_t>(n_dwell) + 1, start);
    return prof;
  }

  const MotionBounds planned{kPlanBackoff * bounds.vmax,
                             kPlanBackoff * bounds.amax,
                             kPlanBackoff * bounds.jmax};
  double t_j, t_a, t_v;
  solve_phases(dist, planned, t_j, t_a, t_v);

  const double durs[7] = {t_j, t_a, t_j, t_v, t_j, t_a, t_j};
  const double jerks[7] = {planned.jmax, 0.0,          -planned.jmax, 0.0,
                           -planned.jmax, 0.0,          planned.jmax};
  Segment segs[7];
  double p = 0.0, v = 0.0, a = 0.0;
  double total = 0.0;
  for (int i = 0; i < 7; ++i) {
    segs[i] = Segment{durs[i], jerks[i], a, v, p};
    p = seg_pos(segs[i], durs[i]);
    v = seg_vel(segs[i], durs[i]);
    a = seg_acc(segs[i], durs[i]);
    total += durs[i];
  }

  const double dir = end > start ? 1.0 : -1.0;
  const long n_move = static_cast<long>(std::ceil(total / ts - 1e-12)) + 1;
  prof.r.reserve(n_move + n_dwell);
  int seg = 0;
  double seg_start = 0.0;
  for (long k = 0; k < n_move; ++k) {
    const double t = static_cast<double>(k) * ts;
    if (t >= total) {
      prof.r.push_back(end);
      continue;
    }
    while (seg < 6 && t >= seg_start + segs[seg].dur) {
      seg_start += segs[seg].dur;
      ++seg;
    }
    prof.r.push_back(start + dir * seg_pos(segs[seg], t - seg_start));
  }
  // Hold the endpoint exactly; the last in-motion sample generally falls
  // short of t = total on the sample grid.
  if (prof.r.back() != end) prof.r.back() = end;
  for (long k = 0; k < n_dwell; ++k) prof.r.push_back(end);
  return prof;
}

void append_profile(ReferenceProfile& base, const ReferenceProfile& next) {
  if (base.ts != next.ts)
    throw ConfigError("append_profile: mismatched sampling times");
  base.r.insert(base.r.end(), next.r.begin(), next.r.end());
}

DerivativeReport discrete_derivative_check(const ReferenceProfile& profile) {
  const auto& r = profile.r;
  const double ts = profile.ts;
  if (r.size() < 4)
    throw NumericalError("discrete_derivative_check: profile too short");
  DerivativeReport rep;
  for (std::size_t k = 1; k < r.size(); ++k)
    rep.vmax_obs = std::max(rep.vmax_obs, std::abs(r[k] - r[k - 1]) / ts);
  for (std::size_t k = 2; k < r.size(); ++k)
    rep.amax_obs = std::max(rep.amax_obs,
                            std::abs(r[k] - 2 * r[k - 1] + r[k - 2]) /
                                (ts * ts));
  for (std::size_t k = 3; k < r.size(); ++k)
    rep.jmax_obs = std::max(
        rep.jmax_obs,
        std::abs(r[k] - 3 * r[k - 1] + 3 * r[k - 2] - r[k - 3]) /
            (ts * ts * ts));
  return rep;
}

namespace {

ReferenceProfile back_and_forth(double a, double b, int strokes, double dwell,
                                double ts, const std::string& id) {
  const MotionBounds bounds{};  // paper bounds: 0.05 m/s, 4 m/s^2, 1000 m/s^3
  ReferenceProfile prof = make_point_to_point(a, b, bounds, ts, dwell);
  double from = b, to = a;
  for (int s = 1; s < strokes; ++s) {
    append_profile(prof, make_point_to_point(from, to, bounds, ts, dwell));
    std::swap(from, to);
  }
  prof.id = id;
  return prof;
}

}  // namespace

ReferenceProfile make_r1(double ts, int strokes, double dwell) {
  return back_and_forth(-0.1, 0.1, strokes, dwell, ts, "r1");
}

ReferenceProfile make_r2(double ts, int strokes, double dwell) {
  return back_and_forth(0.0, 0.17, strokes, dwell, ts, "r2");
}

}  // namespace pgnnff
