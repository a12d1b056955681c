#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <unistd.h>

#include "pgnnff/config.hpp"
#include "pgnnff/io.hpp"
#include "pgnnff/nn.hpp"
#include "test_helpers.hpp"

using namespace pgnnff;
using namespace pgnnff::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pgnnff_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("toml parsing") {
  const std::string text = R"(
# experiment
root_seed = 7
threads = 2

[plant]
m = 20.5          # kg
fv = 100.0
g = "sin_tanh"

[train]
nl = 8
iterations = 100
)";
  const auto table = parse_toml(text, "test");
  CHECK(table.at("root_seed").num == 7);
  CHECK(table.at("plant.m").num == 20.5);
  CHECK(table.at("plant.g").str == "sin_tanh");
  CHECK(table.at("train.nl").num == 8);

  CHECK_THROWS_AS(parse_toml("key value\n", "test"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[unclosed\n", "test"), ConfigError);
  CHECK_THROWS_AS(parse_toml("k = 1\nk = 2\n", "test"), ConfigError);
}

TEST_CASE("experiment config") {
  SUBCASE("defaults resolve and echo round-trips") {
    const ExperimentConfig c = ExperimentConfig::from_toml_text("", "empty");
    CHECK(c.plant.m == 18.8);
    CHECK(c.plant.controller.kp ==
          doctest::Approx(18.8 * std::pow(2 * M_PI * 50, 2)));
    CHECK(c.spec.n_b == 2);
    const std::string echo = c.echo_toml();
    const ExperimentConfig c2 =
        ExperimentConfig::from_toml_text(echo, "echo");
    CHECK(c2.plant.m == c.plant.m);
    CHECK(c2.plant.controller.kp == c.plant.controller.kp);
    CHECK(c2.train_lambda == c.train_lambda);
    CHECK(c2.table_nl == c.table_nl);
    CHECK(c2.echo_toml() == echo);
  }

  SUBCASE("negative ts is rejected naming the field") {
    try {
      ExperimentConfig::from_toml_text("[plant]\nts = -1.0\n", "bad");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("plant.ts") != std::string::npos);
    }
  }

  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(
        ExperimentConfig::from_toml_text("[plant]\nmass = 3.0\n", "bad"),
        ConfigError);
  }

  SUBCASE("controller gains follow an overridden mass") {
    const ExperimentConfig c =
        ExperimentConfig::from_toml_text("[plant]\nm = 10.0\n", "m10");
    CHECK(c.plant.controller.kp ==
          doctest::Approx(10.0 * std::pow(2 * M_PI * 50, 2)));
  }
}

TEST_CASE("csv round trips") {
  TempDir tmp;

  SUBCASE("dataset") {
    Dataset d;
    d.ts = 1e-4;
    d.y = smooth_positions(3, 50);
    for (int i = 0; i < 50; ++i) d.u.push_back(std::sin(i * 0.7) * 12.345678901234567);
    write_dataset_csv(tmp.path / "d.csv", d);
    const Dataset back = read_dataset_csv(tmp.path / "d.csv", 1e-4);
    REQUIRE(back.size() == d.size());
    for (long i = 0; i < d.size(); ++i) {
      CHECK(back.u[i] == d.u[i]);
      CHECK(back.y[i] == d.y[i]);
    }
  }

  SUBCASE("reference and feedforward") {
    const ReferenceProfile r = make_r1(1e-4, 1, 0.01);
    write_reference_csv(tmp.path / "r.csv", r);
    const ReferenceProfile back = read_reference_csv(tmp.path / "r.csv", 1e-4);
    REQUIRE(back.size() == r.size());
    for (long i = 0; i < r.size(); ++i) CHECK(back.r[i] == r.r[i]);

    std::vector<double> ff{1.0, -2.5, 3.25e-17, 7.0};
    write_ff_csv(tmp.path / "ff.csv", ff);
    CHECK(read_ff_csv(tmp.path / "ff.csv") == ff);
  }

  SUBCASE("writes are byte-identical across repeats") {
    Dataset d;
    d.ts = 1e-4;
    d.y = smooth_positions(5, 30);
    d.u.assign(30, 1.0 / 3.0);
    write_dataset_csv(tmp.path / "a.csv", d);
    write_dataset_csv(tmp.path / "b.csv", d);
    CHECK(read_text_file(tmp.path / "a.csv") ==
          read_text_file(tmp.path / "b.csv"));
  }

  SUBCASE("wrong header is an IoError") {
    write_text_file(tmp.path / "bad.csv", "a,b\n1,2\n");
    CHECK_THROWS_AS(read_dataset_csv(tmp.path / "bad.csv", 1e-4), IoError);
  }

  SUBCASE("missing file is an IoError") {
    CHECK_THROWS_AS(read_dataset_csv(tmp.path / "nope.csv", 1e-4), IoError);
  }
}

TEST_CASE("model json round trips") {
  TempDir tmp;

  SUBCASE("lip model carries {theta, basis_kind, spec}") {
    const Model m = Model::from_lip(LipParams{clm_theta0()}, "clm",
                                    RegressorSpec{0, 2, 0, 1e-4});
    write_model_json(tmp.path / "lip.json", m);
    const Model back = read_model_json(tmp.path / "lip.json");
    CHECK(back.kind == PredictorKind::Lip);
    CHECK(back.lip.theta == m.lip.theta);
    CHECK(back.basis_kind == "clm");
    CHECK(back.spec.n_b == 2);
    CHECK(back.spec.ts == 1e-4);
  }

  SUBCASE("pgnn model restores layers, scaling, and predictor kind") {
    PGNNParams p;
    p.nn = init_hidden_random({4, 6}, 11, 1.0);
    Rng rng(100);
    for (long c = 0; c < 6; ++c)
      p.nn.layers.back().W(0, c) = rng.uniform(-1, 1);
    p.nn.layers.back().B[0] = 0.5;
    p.theta_phy = clm_theta0();
    Vec scaling(4);
    scaling << 0.01, 2.0, 1.0, 9.0;
    const Model m = Model::from_pgnn(p, scaling, "clm",
                                     RegressorSpec{0, 2, 0, 1e-4}, false);
    write_model_json(tmp.path / "pgnn.json", m);
    const Model back = read_model_json(tmp.path / "pgnn.json");
    CHECK(back.kind == PredictorKind::Pgnn);
    CHECK(back.pgnn.theta_phy == p.theta_phy);
    CHECK(back.input_scaling == scaling);
    REQUIRE(back.pgnn.nn.layers.size() == p.nn.layers.size());
    for (std::size_t i = 0; i < p.nn.layers.size(); ++i) {
      CHECK(back.pgnn.nn.layers[i].W == p.nn.layers[i].W);
      CHECK(back.pgnn.nn.layers[i].B == p.nn.layers[i].B);
    }

    // Predictions agree exactly after the round trip.
    const BasisMap map = BasisMap::clm(1e-4);
    Dataset d;
    d.ts = 1e-4;
    d.y = smooth_positions(6, 40);
    d.u.assign(40, 0.0);
    const Regressor phi = build_regressor(d, 10, RegressorSpec{0, 2, 0, 1e-4});
    CHECK(model_predict(back, map, phi) == model_predict(m, map, phi));
  }

  SUBCASE("nn_only predictor kind survives") {
    PGNNParams p;
    p.nn = init_hidden_random({4, 3}, 12, 1.0);
    p.theta_phy = clm_theta0();
    const Model m = Model::from_pgnn(p, Vec::Ones(4), "clm",
                                     RegressorSpec{0, 2, 0, 1e-4}, true);
    write_model_json(tmp.path / "nn.json", m);
    CHECK(read_model_json(tmp.path / "nn.json").kind ==
          PredictorKind::NnOnly);
  }
}

TEST_CASE("format_double uses 17 significant digits") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(0.5e-5) == "5.0000000000000004e-06");
}
