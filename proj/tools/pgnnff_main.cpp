// pgnnff: inverse-dynamics identification and feedforward evaluation on a
// simulated coreless linear motor. Subcommands cover the full pipeline from
// data generation to the reproduction of the comparison tables.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pgnnff/config.hpp"
#include "pgnnff/evaluation.hpp"
#include "pgnnff/io.hpp"
#include "pgnnff/lip.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pgnnff;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0 = take from config
};

ExperimentConfig load_config(const CommonOpts& opts) {
  if (opts.config_path.empty())
    throw ConfigError("missing --config <path>");
  if (!fs::exists(opts.config_path))
    throw IoError("config file not found: " + opts.config_path);
  ExperimentConfig cfg = ExperimentConfig::load(opts.config_path);
  if (opts.seed) {
    cfg.root_seed = *opts.seed;
    cfg.plant.seed = *opts.seed;
    cfg.training.seed = *opts.seed;
  }
  if (opts.threads > 0) cfg.threads = opts.threads;
  return cfg;
}

fs::path resolve_out_dir(const CommonOpts& opts, const ExperimentConfig& cfg) {
  if (!opts.out.empty()) return opts.out;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  const char* root = std::getenv("PGNN_FF_OUT");
  const fs::path base = root ? fs::path(root) : fs::path("runs");
  return base / fs::path(opts.config_path).stem();
}

ReferenceProfile make_reference_by_name(const ExperimentConfig& cfg,
                                        const std::string& name) {
  if (name == "r1")
    return make_r1(cfg.plant.ts, cfg.data_strokes, cfg.data_dwell);
  if (name == "r2")
    return make_r2(cfg.plant.ts, cfg.data_strokes, cfg.data_dwell);
  throw ConfigError("unknown reference preset: '" + name + "'");
}

Dataset require_dataset(const std::string& path, double ts) {
  if (!fs::exists(path)) throw IoError("dataset not found: " + path);
  return read_dataset_csv(path, ts);
}

Model require_model(const std::string& path) {
  if (!fs::exists(path)) throw IoError("model file not found: " + path);
  return read_model_json(path);
}

TrainingConfig training_config(const ExperimentConfig& cfg,
                               const LipParams& anchor, int n_out) {
  TrainingConfig t = cfg.training;
  t.theta_lip_ref = anchor;
  if (t.mode != TrainMode::Unregularized)
    t.lambda_diag = Vec::Constant(n_out, cfg.train_lambda);
  else
    t.lambda_diag = Vec::Zero(n_out);
  return t;
}

json dataset_meta(const ExperimentConfig& cfg, const std::string& reference) {
  const PlantConfig p = cfg.data_plant();
  json j;
  j["reference"] = reference;
  j["seed"] = cfg.root_seed;
  j["dither"] = cfg.data_dither;
  j["plant"] = {{"m", p.m},
                {"fv", p.fv},
                {"fc", p.fc},
                {"fk", p.fk},
                {"ts", p.ts},
                {"encoder_resolution", p.encoder_resolution},
                {"dither_sigma", p.dither_sigma},
                {"g", p.g.kind == GSpec::Kind::None
                          ? "none"
                          : (p.g.kind == GSpec::Kind::SinTanh ? "sin_tanh"
                                                              : "tanh_net")}};
  j["controller"] = {{"kp", p.controller.kp},
                     {"ki", p.controller.ki},
                     {"kd", p.controller.kd}};
  return j;
}

int cmd_generate_data(const CommonOpts& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const fs::path out = resolve_out_dir(opts, cfg);
  const ReferenceProfile ref =
      make_reference_by_name(cfg, cfg.data_reference);
  const ClosedLoopResult run =
      run_closed_loop(ref, nullptr, cfg.data_plant(), cfg.data_dither);
  write_dataset_csv(out / "dataset.csv", run.data);
  write_json_file(out / "dataset_meta.json",
                  dataset_meta(cfg, cfg.data_reference));
  write_text_file(out / "config_echo.toml", cfg.echo_toml());
  std::cout << "wrote " << (out / "dataset.csv").string() << " ("
            << run.data.size() << " samples)\n";
  return 0;
}

int cmd_fit_lip(const CommonOpts& opts, const std::string& dataset_path) {
  const ExperimentConfig cfg = load_config(opts);
  const fs::path out = resolve_out_dir(opts, cfg);
  const Dataset data = require_dataset(dataset_path, cfg.plant.ts);
  const BasisMap map = make_basis(cfg.basis, cfg.plant.ts);
  const LipParams lip = fit_lip(data, map, cfg.spec);
  write_model_json(out / "lip.json",
                   Model::from_lip(lip, cfg.basis, cfg.spec));
  std::cout << "theta_lip =";
  for (long i = 0; i < lip.theta.size(); ++i)
    std::cout << " " << format_double(lip.theta[i]);
  std::cout << "\nwrote " << (out / "lip.json").string() << "\n";
  return 0;
}

LipParams anchor_from_file_or_fit(const ExperimentConfig& cfg,
                                  const Dataset& data, const BasisMap& map,
                                  const std::string& lip_path) {
  if (!lip_path.empty()) {
    const Model m = require_model(lip_path);
    if (m.kind != PredictorKind::Lip)
      throw ConfigError("--lip must point to a LIP model file");
    return m.lip;
  }
  return fit_lip(data, map, cfg.spec);
}

int cmd_train(const CommonOpts& opts, const std::string& dataset_path,
              const std::string& lip_path, const std::string& tag) {
  const ExperimentConfig cfg = load_config(opts);
  const fs::path out = resolve_out_dir(opts, cfg);
  const Dataset data = require_dataset(dataset_path, cfg.plant.ts);
  const BasisMap map = make_basis(cfg.basis, cfg.plant.ts);
  const LipParams anchor = anchor_from_file_or_fit(cfg, data, map, lip_path);
  const TrainingConfig tcfg = training_config(cfg, anchor, map.n_out);

  const TrainResult res = train(data, map, cfg.spec, tcfg);
  Model model =
      Model::from_pgnn(res.params, res.input_scaling, cfg.basis, cfg.spec,
                       tcfg.mode == TrainMode::PinnBaseline);
  const std::string stem = tag.empty() ? "model" : "model_" + tag;
  json cfg_echo;
  cfg_echo["mode"] = to_string(tcfg.mode);
  cfg_echo["lambda"] = cfg.train_lambda;
  cfg_echo["nl"] = tcfg.hidden_widths.front();
  cfg_echo["iterations"] = tcfg.optimizer.max_iterations;
  cfg_echo["step_size"] = tcfg.optimizer.step_size;
  cfg_echo["seed"] = tcfg.seed;
  cfg_echo["max_rows"] = tcfg.max_rows;
  cfg_echo["stride"] = res.stride;
  write_model_json(out / (stem + ".json"), model, &cfg_echo);
  write_history_csv(
      out / (tag.empty() ? "history.csv" : "history_" + tag + ".csv"),
      res.history);

  const auto& best = res.history.records[res.history.best_iteration];
  std::cout << "best iteration " << res.history.best_iteration << ": cost "
            << format_double(best.total) << " (data fit "
            << format_double(best.data_fit) << ", regularization "
            << format_double(best.reg_term) << ")\n";
  std::cout << "wrote " << (out / (stem + ".json")).string() << "\n";
  return 0;
}

int cmd_make_reference(const CommonOpts& opts, const std::string& preset,
                       double start, double end, double dwell, double ts,
                       const std::string& out_file) {
  ReferenceProfile ref;
  if (!preset.empty()) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = load_config(opts);
    cfg.plant.ts = ts > 0 ? ts : cfg.plant.ts;
    ref = make_reference_by_name(cfg, preset);
  } else {
    MotionBounds bounds;
    ref = make_point_to_point(start, end, bounds, ts > 0 ? ts : 1e-4, dwell);
    ref.id = "custom";
  }
  const fs::path path =
      out_file.empty() ? fs::path(ref.id + ".csv") : fs::path(out_file);
  write_reference_csv(path, ref);
  std::cout << "wrote " << path.string() << " (" << ref.size()
            << " samples)\n";
  return 0;
}

int cmd_make_ff(const std::string& model_path,
                const std::string& reference_path,
                const std::string& out_file) {
  const Model model = require_model(model_path);
  if (!fs::exists(reference_path))
    throw IoError("reference not found: " + reference_path);
  const ReferenceProfile ref =
      read_reference_csv(reference_path, model.spec.ts);
  const BasisMap map = make_basis(model.basis_kind, model.spec.ts);
  const std::vector<double> uff = generate_ff(model, map, model.spec, ref);
  const fs::path path = out_file.empty() ? fs::path("ff.csv") : fs::path(out_file);
  write_ff_csv(path, uff);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& model_path,
                 const std::string& reference_name) {
  const ExperimentConfig cfg = load_config(opts);
  const fs::path out = resolve_out_dir(opts, cfg);
  Model model = require_model(model_path);
  model.id = fs::path(model_path).stem().string();
  const ReferenceProfile ref = make_reference_by_name(cfg, reference_name);
  const TrackingResult res = run_tracking_experiment(model, ref, cfg.plant);
  write_tracking_csv(
      out / ("tracking_" + model.id + "_" + ref.id + ".csv"), ref, res);
  std::cout << "MAE(" << model.id << ", " << ref.id
            << ") = " << format_double(res.mae) << " m\n";
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& dataset_path,
              const std::string& lip_path) {
  const ExperimentConfig cfg = load_config(opts);
  const fs::path out = resolve_out_dir(opts, cfg);
  const Dataset data = require_dataset(dataset_path, cfg.plant.ts);
  const BasisMap map = make_basis(cfg.basis, cfg.plant.ts);
  const LipParams anchor = anchor_from_file_or_fit(cfg, data, map, lip_path);
  TrainingConfig base = training_config(cfg, anchor, map.n_out);

  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < cfg.sweep_seeds; ++i)
    seeds.push_back(cfg.root_seed + static_cast<std::uint64_t>(i));
  const std::vector<SweepRow> rows =
      lambda_sweep(data, map, cfg.spec, base, cfg.sweep_lambdas, seeds);
  write_sweep_csv(out / "lambda_sweep.csv", rows);
  std::cout << "wrote " << (out / "lambda_sweep.csv").string() << " ("
            << rows.size() << " rows)\n";
  return 0;
}

int cmd_reproduce(const CommonOpts& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const fs::path out = resolve_out_dir(opts, cfg);
  write_text_file(out / "config_echo.toml", cfg.echo_toml());

  // References: nominal r1 for training and evaluation, r2 for
  // extrapolation to positions outside the training set.
  const ReferenceProfile r1 =
      make_r1(cfg.plant.ts, cfg.data_strokes, cfg.data_dwell);
  const ReferenceProfile r2 =
      make_r2(cfg.plant.ts, cfg.data_strokes, cfg.data_dwell);
  write_reference_csv(out / "r1.csv", r1);
  write_reference_csv(out / "r2.csv", r2);

  std::cout << "[1/6] generating closed-loop training data ("
            << r1.size() << " samples)\n";
  const ClosedLoopResult run =
      run_closed_loop(r1, nullptr, cfg.data_plant(), cfg.data_dither);
  write_dataset_csv(out / "dataset.csv", run.data);
  write_json_file(out / "dataset_meta.json", dataset_meta(cfg, "r1"));

  std::cout << "[2/6] fitting the LIP model\n";
  const BasisMap map = make_basis(cfg.basis, cfg.plant.ts);
  const LipParams lip = fit_lip(run.data, map, cfg.spec);
  write_model_json(out / "lip.json",
                   Model::from_lip(lip, cfg.basis, cfg.spec));
  const TrainingConfig base = training_config(cfg, lip, map.n_out);

  std::cout << "[3/6] training the headline regularized model\n";
  {
    TrainingConfig tcfg = base;
    tcfg.mode = TrainMode::Regularized;
    const TrainResult res = train(run.data, map, cfg.spec, tcfg);
    Model model = Model::from_pgnn(res.params, res.input_scaling, cfg.basis,
                                   cfg.spec, false);
    model.id = "regularized_nl" +
               std::to_string(tcfg.hidden_widths.front());
    write_model_json(out / ("model_" + model.id + ".json"), model);
    write_history_csv(out / ("history_" + model.id + ".csv"), res.history);
    for (const auto* ref : {&r1, &r2}) {
      const TrackingResult tr = run_tracking_experiment(model, *ref, cfg.plant);
      write_tracking_csv(
          out / ("tracking_" + model.id + "_" + ref->id + ".csv"), *ref, tr);
    }
  }
  {
    Model lip_model = Model::from_lip(lip, cfg.basis, cfg.spec);
    const TrackingResult tr = run_tracking_experiment(lip_model, r1, cfg.plant);
    write_tracking_csv(out / "tracking_lip_r1.csv", r1, tr);
  }

  std::cout << "[4/6] lambda sweep\n";
  std::vector<std::uint64_t> sweep_seeds;
  for (int i = 0; i < cfg.sweep_seeds; ++i)
    sweep_seeds.push_back(cfg.root_seed + static_cast<std::uint64_t>(i));
  const std::vector<SweepRow> sweep_rows = lambda_sweep(
      run.data, map, cfg.spec, base, cfg.sweep_lambdas, sweep_seeds);
  write_sweep_csv(out / "lambda_sweep.csv", sweep_rows);

  std::cout << "[5/6] comparison table (" << cfg.table_modes.size() << " modes x "
            << cfg.table_nl.size() << " widths x " << cfg.table_seeds
            << " seeds)\n";
  std::vector<TrainMode> modes;
  for (const auto& m : cfg.table_modes) modes.push_back(train_mode_from_string(m));
  std::vector<std::uint64_t> table_seeds;
  for (int i = 0; i < cfg.table_seeds; ++i)
    table_seeds.push_back(cfg.root_seed + static_cast<std::uint64_t>(i));
  const std::vector<TableCell> cells =
      comparison_table(run.data, {r1, r2}, modes, cfg.table_nl, table_seeds,
                       map, cfg.spec, base, cfg.plant, cfg.threads);
  write_table_csv(out / "table1_analog.csv", cells);
  write_text_file(out / "table1_analog.txt", render_table_text(cells));

  std::cout << "[6/6] done; artifacts in " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-guided neural network feedforward identification "
               "on a simulated coreless linear motor"};
  app.require_subcommand(1);

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "Experiment config (TOML)");
  app.add_option("--out", opts.out, "Output directory");
  std::uint64_t seed_value = 0;
  auto* seed_opt =
      app.add_option("--seed", seed_value, "Override the root seed");
  app.add_option("--threads", opts.threads, "Worker threads for sweeps");

  auto* gen = app.add_subcommand("generate-data",
                                 "Simulate closed-loop training data");
  auto* fit = app.add_subcommand("fit-lip", "Closed-form LIP identification");
  std::string dataset_path;
  fit->add_option("--dataset", dataset_path, "Dataset CSV")->required();

  auto* tr = app.add_subcommand("train", "Train a PGNN on a dataset");
  std::string train_dataset, train_lip, train_tag;
  tr->add_option("--dataset", train_dataset, "Dataset CSV")->required();
  tr->add_option("--lip", train_lip, "LIP anchor model JSON (fit if absent)");
  tr->add_option("--tag", train_tag, "Suffix for output file names");

  auto* mkref = app.add_subcommand("make-reference",
                                   "Generate a jerk-limited reference");
  std::string preset, ref_out;
  double start = 0.0, end = 0.1, dwell = 0.2, ts = 0.0;
  mkref->add_option("--preset", preset, "r1 or r2");
  mkref->add_option("--start", start, "Start position [m]");
  mkref->add_option("--end", end, "End position [m]");
  mkref->add_option("--dwell", dwell, "Dwell after the move [s]");
  mkref->add_option("--ts", ts, "Sampling time [s]");
  mkref->add_option("--output", ref_out, "Output CSV path");

  auto* mkff = app.add_subcommand("make-ff",
                                  "Feedforward sequence from a model");
  std::string ff_model, ff_reference, ff_out;
  mkff->add_option("--model", ff_model, "Model JSON")->required();
  mkff->add_option("--reference", ff_reference, "Reference CSV")->required();
  mkff->add_option("--output", ff_out, "Output CSV path");

  auto* ev = app.add_subcommand("evaluate", "Tracking experiment for a model");
  std::string eval_model, eval_reference = "r1";
  ev->add_option("--model", eval_model, "Model JSON")->required();
  ev->add_option("--reference", eval_reference, "Reference preset (r1|r2)");

  auto* sw = app.add_subcommand("sweep", "Regularization-weight sweep");
  std::string sweep_dataset, sweep_lip;
  sw->add_option("--dataset", sweep_dataset, "Dataset CSV")->required();
  sw->add_option("--lip", sweep_lip, "LIP anchor model JSON (fit if absent)");

  auto* rep = app.add_subcommand(
      "reproduce", "Full pipeline: data, LIP, training modes, tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) opts.seed = seed_value;

  try {
    if (gen->parsed()) return cmd_generate_data(opts);
    if (fit->parsed()) return cmd_fit_lip(opts, dataset_path);
    if (tr->parsed()) return cmd_train(opts, train_dataset, train_lip, train_tag);
    if (mkref->parsed())
      return cmd_make_reference(opts, preset, start, end, dwell, ts, ref_out);
    if (mkff->parsed()) return cmd_make_ff(ff_model, ff_reference, ff_out);
    if (ev->parsed()) return cmd_evaluate(opts, eval_model, eval_reference);
    if (sw->parsed()) return cmd_sweep(opts, sweep_dataset, sweep_lip);
    if (rep->parsed()) return cmd_reproduce(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
