#include <doctest.h>

#include "pgnnff/rng.hpp"
#include "pgnnff/types.hpp"
#include "test_helpers.hpp"

using namespace pgnnff;

TEST_CASE("build_regressor windows the output and input lags") {
  Dataset d;
  d.ts = 1e-4;

  SUBCASE("CLM orders: pure output window") {
    d.y = {1, 2, 3};
    d.u = {0, 0, 0};
    const Regressor r = build_regressor(d, 2, RegressorSpec{0, 2, 0, 1e-4});
    REQUIRE(r.phi.size() == 3);
    CHECK(r.phi[0] == 3);
    CHECK(r.phi[1] == 2);
    CHECK(r.phi[2] == 1);
  }

  SUBCASE("output lead plus input lag") {
    d.y = {0, 1, 2, 3};
    d.u = {9, 8, 7, 6};
    const Regressor r = build_regressor(d, 2, RegressorSpec{1, 1, 1, 1e-4});
    REQUIRE(r.phi.size() == 4);
    CHECK(r.phi[0] == 3);
    CHECK(r.phi[1] == 2);
    CHECK(r.phi[2] == 1);
    CHECK(r.phi[3] == 8);
  }

  SUBCASE("boundary violation throws") {
    d.y = {1, 2, 3, 4};
    d.u = {0, 0, 0, 0};
    const RegressorSpec spec{0, 2, 0, 1e-4};
    CHECK_THROWS_AS(build_regressor(d, spec.n_b - 1, spec), NumericalError);
  }
}

TEST_CASE("valid_sample_range is tight") {
  SUBCASE("examples") {
    const SampleRange a = valid_sample_range(RegressorSpec{0, 2, 0, 1e-4}, 10);
    CHECK(a.t_min == 2);
    CHECK(a.t_max == 9);
    const SampleRange b = valid_sample_range(RegressorSpec{1, 1, 1, 1e-4}, 10);
    CHECK(b.t_min == 1);
    CHECK(b.t_max == 8);
    CHECK_THROWS_AS(valid_sample_range(RegressorSpec{0, 2, 0, 1e-4}, 2),
                    NumericalError);
  }

  SUBCASE("build_regressor succeeds at both endpoints, fails one outside") {
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
      RegressorSpec spec;
      spec.n_a = static_cast<int>(rng.next_u64() % 3);
      spec.n_b = static_cast<int>(rng.next_u64() % 3);
      spec.n_c = static_cast<int>(rng.next_u64() % 3);
      const long n = 8 + static_cast<long>(rng.next_u64() % 5);
      Dataset d;
      d.ts = 1e-4;
      for (long i = 0; i < n; ++i) {
        d.y.push_back(rng.uniform());
        d.u.push_back(rng.uniform());
      }
      const SampleRange r = valid_sample_range(spec, n);
      CHECK_NOTHROW(build_regressor(d, r.t_min, spec));
      CHECK_NOTHROW(build_regressor(d, r.t_max, spec));
      if (r.t_min > 0)
        CHECK_THROWS_AS(build_regressor(d, r.t_min - 1, spec), NumericalError);
      CHECK_THROWS_AS(build_regressor(d, r.t_max + 1, spec), NumericalError);
    }
  }
}

TEST_CASE("regressor windowing is exact against brute-force reconstruction") {
  Rng rng(11);
  Dataset d;
  d.ts = 1e-4;
  const long n = 40;
  for (long i = 0; i < n; ++i) {
    d.y.push_back(rng.uniform(-1, 1));
    d.u.push_back(rng.uniform(-1, 1));
  }
  const RegressorSpec spec{2, 3, 2, 1e-4};
  const SampleRange r = valid_sample_range(spec, n);
  for (long t = r.t_min; t <= r.t_max; ++t) {
    const Regressor reg = build_regressor(d, t, spec);
    long k = 0;
    for (long i = t + spec.n_a; i >= t - spec.n_b; --i)
      CHECK(reg.phi[k++] == d.y[i]);
    for (long i = t - 1; i >= t - spec.n_c; --i)
      CHECK(reg.phi[k++] == d.u[i]);
    CHECK(k == spec.length());
  }
}

TEST_CASE("dataset validation") {
  Dataset d;
  d.ts = 1e-4;
  d.u = {1.0};
  d.y = {1.0, 2.0};
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d.y = {std::nan("")};
  CHECK_THROWS_AS(d.validate(), NumericalError);
}
