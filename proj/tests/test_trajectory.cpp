#include <doctest.h>

#include <cmath>

#include "pgnnff/rng.hpp"
#include "pgnnff/trajectory.hpp"
#include "pgnnff/types.hpp"

using namespace pgnnff;

namespace {
const MotionBounds kBounds{0.05, 4.0, 1000.0};
}

TEST_CASE("make_point_to_point") {
  SUBCASE("start == end gives a constant dwell profile") {
    const ReferenceProfile p =
        make_point_to_point(0.03, 0.03, kBounds, 1e-4, 0.01);
    CHECK(p.size() == 101);
    for (double v : p.r) CHECK(v == 0.03);
  }

  SUBCASE("endpoint exactness") {
    Rng rng(4);
    for (int rep = 0; rep < 25; ++rep) {
      const double a = rng.uniform(-0.1, 0.1);
      const double b = rng.uniform(-0.1, 0.1);
      const ReferenceProfile p =
          make_point_to_point(a, b, kBounds, 1e-4, 0.0);
      CHECK(std::abs(p.r.back() - b) <= 1e-9);
      CHECK(p.r.front() == a);
    }
  }

  SUBCASE("bound respect for randomized moves") {
    // Discrete derivatives of stored doubles carry representation noise of
    // order eps*|r|/Ts^k on top of the true profile; allow for it here.
    // The presets (criterion-scale moves) stay within the plain 1e-9 slack
    // because the planner backs off the bounds by more than this noise.
    Rng rng(6);
    const double ts = 1e-4;
    for (int rep = 0; rep < 15; ++rep) {
      MotionBounds bounds;
      bounds.vmax = rng.uniform(0.01, 0.2);
      bounds.amax = rng.uniform(0.5, 8.0);
      bounds.jmax = rng.uniform(100.0, 2000.0);
      const double a = rng.uniform(-0.2, 0.2);
      const double b = rng.uniform(-0.2, 0.2);
      const ReferenceProfile p = make_point_to_point(a, b, bounds, ts, 0.005);
      if (p.size() < 4) continue;
      const double r_max = 0.25;
      const double eps = 2.3e-16;
      const double noise_v = 4 * eps * r_max / ts;
      const double noise_a = 8 * eps * r_max / (ts * ts);
      const double noise_j = 16 * eps * r_max / (ts * ts * ts);
      const DerivativeReport rep_ = discrete_derivative_check(p);
      CHECK(rep_.vmax_obs <= bounds.vmax + 1e-9 + noise_v);
      CHECK(rep_.amax_obs <= bounds.amax + 1e-9 + noise_a);
      CHECK(rep_.jmax_obs <= bounds.jmax + 1e-9 + noise_j);
    }
  }

  SUBCASE("symmetry: reversing start and end mirrors the profile") {
    const ReferenceProfile fwd =
        make_point_to_point(-0.02, 0.07, kBounds, 1e-4, 0.002);
    const ReferenceProfile rev =
        make_point_to_point(0.07, -0.02, kBounds, 1e-4, 0.002);
    REQUIRE(fwd.size() == rev.size());
    for (long i = 0; i < fwd.size(); ++i)
      CHECK(std::abs(fwd.r[i] + rev.r[i] - 0.05) <= 1e-12);
  }
}

TEST_CASE("discrete_derivative_check") {
  SUBCASE("constant profile reports zeros") {
    ReferenceProfile p;
    p.ts = 1e-4;
    p.r.assign(50, 0.1);
    const DerivativeReport r = discrete_derivative_check(p);
    CHECK(r.vmax_obs == 0.0);
    CHECK(r.amax_obs == 0.0);
    CHECK(r.jmax_obs == 0.0);
  }

  SUBCASE("linear ramp reports its slope and zero acceleration") {
    ReferenceProfile p;
    p.ts = 1e-4;
    const double c = 0.04;
    for (int t = 0; t < 100; ++t) p.r.push_back(c * t * 1e-4);
    const DerivativeReport r = discrete_derivative_check(p);
    CHECK(r.vmax_obs == doctest::Approx(c).epsilon(1e-9));
    CHECK(r.amax_obs <= 1e-6);
  }

  SUBCASE("too-short profile throws") {
    ReferenceProfile p;
    p.ts = 1e-4;
    p.r = {1, 2, 3};
    CHECK_THROWS_AS(discrete_derivative_check(p), NumericalError);
  }
}

TEST_CASE("r1 and r2 presets") {
  const double ts = 1e-4;

  SUBCASE("r1 respects the stated bounds and saturates them") {
    const ReferenceProfile r1 = make_r1(ts);
    CHECK(r1.id == "r1");
    const DerivativeReport rep = discrete_derivative_check(r1);
    CHECK(rep.vmax_obs <= 0.05 + 1e-9);
    CHECK(rep.amax_obs <= 4.0 + 1e-9);
    CHECK(rep.jmax_obs <= 1000.0 + 1e-9);
    // Long strokes hit their limits.
    CHECK(rep.vmax_obs >= 0.9 * 0.05);
    CHECK(rep.amax_obs >= 0.9 * 4.0);
    CHECK(rep.jmax_obs >= 0.9 * 1000.0);
    // Strokes move between -0.1 and 0.1.
    double lo = 1e9, hi = -1e9;
    for (double v : r1.r) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo == doctest::Approx(-0.1));
    CHECK(hi == doctest::Approx(0.1));
  }

  SUBCASE("r2 reaches 0.17 with the same bounds") {
    const ReferenceProfile r2 = make_r2(ts);
    const DerivativeReport rep = discrete_derivative_check(r2);
    CHECK(rep.vmax_obs <= 0.05 + 1e-9);
    CHECK(rep.amax_obs <= 4.0 + 1e-9);
    CHECK(rep.jmax_obs <= 1000.0 + 1e-9);
    double hi = -1e9, lo = 1e9;
    for (double v : r2.r) {
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    CHECK(hi == doctest::Approx(0.17));
    CHECK(lo == doctest::Approx(0.0));
  }

  SUBCASE("training-sized record at 10 kHz") {
    const ReferenceProfile r1 = make_r1(ts);
    CHECK(r1.size() > 150000);  // ~4 strokes of 0.2 m at 0.05 m/s plus dwell
    CHECK(r1.size() < 250000);
  }
}
