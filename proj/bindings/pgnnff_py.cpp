#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pgnnff/config.hpp"
#include "pgnnff/evaluation.hpp"
#include "pgnnff/io.hpp"
#include "pgnnff/lip.hpp"

namespace py = pybind11;
using namespace pgnnff;

PYBIND11_MODULE(_pgnnff, m) {
  m.doc() = "Physics-guided neural network inverse-dynamics identification "
            "and feedforward evaluation";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "NumericalError");
  py::register_exception<IoError>(m, "IoError");

  py::class_<RegressorSpec>(m, "RegressorSpec")
      .def(py::init<int, int, int, double>(), py::arg("n_a") = 0,
           py::arg("n_b") = 2, py::arg("n_c") = 0, py::arg("ts") = 1e-4)
      .def_readwrite("n_a", &RegressorSpec::n_a)
      .def_readwrite("n_b", &RegressorSpec::n_b)
      .def_readwrite("n_c", &RegressorSpec::n_c)
      .def_readwrite("ts", &RegressorSpec::ts)
      .def("length", &RegressorSpec::length);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](std::vector<double> u, std::vector<double> y,
                       double ts) {
             Dataset d{std::move(u), std::move(y), ts};
             d.validate();
             return d;
           }),
           py::arg("u"), py::arg("y"), py::arg("ts") = 1e-4)
      .def_readonly("u", &Dataset::u)
      .def_readonly("y", &Dataset::y)
      .def_readonly("ts", &Dataset::ts)
      .def("__len__", &Dataset::size);

  py::class_<BasisMap>(m, "BasisMap")
      .def_readonly("n_out", &BasisMap::n_out)
      .def_readonly("name", &BasisMap::name);
  m.def("make_basis", &make_basis, py::arg("key"), py::arg("ts"));
  m.def("delta", &delta, py::arg("y_t"), py::arg("y_tm1"), py::arg("ts"));
  m.def(
      "eval_basis",
      [](const BasisMap& map, const Vec& phi) { return eval_basis(map, phi); },
      py::arg("basis"), py::arg("phi"));
  m.def(
      "build_regressor",
      [](const Dataset& d, long t, const RegressorSpec& s) {
        return build_regressor(d, t, s).phi;
      },
      py::arg("dataset"), py::arg("t"), py::arg("spec"));

  m.def(
      "fit_lip",
      [](const Dataset& d, const BasisMap& map, const RegressorSpec& s) {
        return fit_lip(d, map, s).theta;
      },
      py::arg("dataset"), py::arg("basis"), py::arg("spec"));
  m.def("gram_matrix", &gram_matrix, py::arg("dataset"), py::arg("basis"),
        py::arg("spec"));
  m.def(
      "unmodelled_residual",
      [](const Dataset& d, const Vec& theta, const BasisMap& map,
         const RegressorSpec& s) {
        return unmodelled_residual(d, LipParams{theta}, map, s);
      },
      py::arg("dataset"), py::arg("theta"), py::arg("basis"), py::arg("spec"));

  py::class_<NNLayer>(m, "NNLayer")
      .def_readwrite("W", &NNLayer::W)
      .def_readwrite("B", &NNLayer::B);
  py::class_<NNParams>(m, "NNParams").def_readwrite("layers", &NNParams::layers);
  py::class_<PGNNParams>(m, "PGNNParams")
      .def_readwrite("nn", &PGNNParams::nn)
      .def_readwrite("theta_phy", &PGNNParams::theta_phy);

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("step_size", &OptimizerConfig::step_size)
      .def_readwrite("step_decay", &OptimizerConfig::step_decay)
      .def_readwrite("max_iterations", &OptimizerConfig::max_iterations)
      .def_readwrite("tolerance", &OptimizerConfig::tolerance);

  py::class_<TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("lambda_diag", &TrainingConfig::lambda_diag)
      .def_property(
          "theta_lip_ref",
          [](const TrainingConfig& c) { return c.theta_lip_ref.theta; },
          [](TrainingConfig& c, const Vec& v) { c.theta_lip_ref.theta = v; })
      .def_readwrite("optimizer", &TrainingConfig::optimizer)
      .def_readwrite("seed", &TrainingConfig::seed)
      .def_readwrite("input_scaling", &TrainingConfig::input_scaling)
      .def_property(
          "mode",
          [](const TrainingConfig& c) { return to_string(c.mode); },
          [](TrainingConfig& c, const std::string& s) {
            c.mode = train_mode_from_string(s);
          })
      .def_readwrite("pinn_lambda", &TrainingConfig::pinn_lambda)
      .def_readwrite("hidden_widths", &TrainingConfig::hidden_widths)
      .def_readwrite("max_rows", &TrainingConfig::max_rows);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iteration", &IterationRecord::iteration)
      .def_readonly("total", &IterationRecord::total)
      .def_readonly("data_fit", &IterationRecord::data_fit)
      .def_readonly("reg_term", &IterationRecord::reg_term)
      .def_readonly("theta_phy", &IterationRecord::theta_phy);
  py::class_<TrainingHistory>(m, "TrainingHistory")
      .def_readonly("records", &TrainingHistory::records)
      .def_readonly("best_iteration", &TrainingHistory::best_iteration);
  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("params", &TrainResult::params)
      .def_readonly("history", &TrainResult::history)
      .def_readonly("input_scaling", &TrainResult::input_scaling);

  m.def("train", &train, py::arg("dataset"), py::arg("basis"), py::arg("spec"),
        py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "regularized_cost",
      [](const PGNNParams& p, const Dataset& d, const BasisMap& map,
         const RegressorSpec& s, const TrainingConfig& c) {
        const CostBreakdown b = regularized_cost(p, d, map, s, c);
        return py::make_tuple(b.total, b.data_fit, b.reg_term);
      },
      py::arg("params"), py::arg("dataset"), py::arg("basis"), py::arg("spec"),
      py::arg("config"));

  py::class_<MotionBounds>(m, "MotionBounds")
      .def(py::init<double, double, double>(), py::arg("vmax") = 0.05,
           py::arg("amax") = 4.0, py::arg("jmax") = 1000.0)
      .def_readwrite("vmax", &MotionBounds::vmax)
      .def_readwrite("amax", &MotionBounds::amax)
      .def_readwrite("jmax", &MotionBounds::jmax);
  py::class_<ReferenceProfile>(m, "ReferenceProfile")
      .def_readonly("r", &ReferenceProfile::r)
      .def_readonly("ts", &ReferenceProfile::ts)
      .def_readonly("id", &ReferenceProfile::id)
      .def("__len__", &ReferenceProfile::size);
  m.def("make_point_to_point", &make_point_to_point, py::arg("start"),
        py::arg("end"), py::arg("bounds"), py::arg("ts"), py::arg("dwell"));
  m.def("make_r1", &make_r1, py::arg("ts"), py::arg("strokes") = 4,
        py::arg("dwell") = 0.2);
  m.def("make_r2", &make_r2, py::arg("ts"), py::arg("strokes") = 4,
        py::arg("dwell") = 0.2);
  m.def(
      "discrete_derivative_check",
      [](const ReferenceProfile& p) {
        const DerivativeReport r = discrete_derivative_check(p);
        return py::make_tuple(r.vmax_obs, r.amax_obs, r.jmax_obs);
      },
      py::arg("profile"));

  py::class_<GSpec>(m, "GSpec")
      .def_static("none", &GSpec::none)
      .def_static("sin_tanh", &GSpec::sin_tanh, py::arg("a") = 5.0,
                  py::arg("p") = 0.025, py::arg("b") = 2.0,
                  py::arg("v0") = 0.01)
      .def_static("tanh_net", &GSpec::tanh_net, py::arg("seed"),
                  py::arg("neurons") = 16, py::arg("y_scale") = 0.1,
                  py::arg("v_scale") = 0.05, py::arg("out_scale") = 1.5);
  py::class_<PlantConfig>(m, "PlantConfig")
      .def(py::init<>())
      .def_readwrite("m", &PlantConfig::m)
      .def_readwrite("fv", &PlantConfig::fv)
      .def_readwrite("fc", &PlantConfig::fc)
      .def_readwrite("fk", &PlantConfig::fk)
      .def_readwrite("g", &PlantConfig::g)
      .def_readwrite("ts", &PlantConfig::ts)
      .def_readwrite("encoder_resolution", &PlantConfig::encoder_resolution)
      .def_readwrite("dither_sigma", &PlantConfig::dither_sigma)
      .def_readwrite("seed", &PlantConfig::seed)
      .def("theta0", &PlantConfig::theta0);

  py::class_<TrackingResult>(m, "TrackingResult")
      .def_readonly("e", &TrackingResult::e)
      .def_readonly("mae", &TrackingResult::mae)
      .def_readonly("reference_id", &TrackingResult::reference_id)
      .def_readonly("model_id", &TrackingResult::model_id);
  m.def(
      "run_closed_loop",
      [](const ReferenceProfile& ref,
         const std::optional<std::vector<double>>& ff, const PlantConfig& cfg,
         bool dither) {
        ClosedLoopResult res =
            run_closed_loop(ref, ff ? &*ff : nullptr, cfg, dither);
        return std::make_pair(std::move(res.data), std::move(res.tracking));
      },
      py::arg("reference"), py::arg("feedforward"), py::arg("plant"),
      py::arg("dither"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "mae",
      [](const std::vector<double>& e) {
        return mae(std::span<const double>(e));
      },
      py::arg("e"));

  py::class_<Model>(m, "Model")
      .def_readwrite("id", &Model::id)
      .def_readonly("basis_kind", &Model::basis_kind)
      .def_readonly("spec", &Model::spec);
  m.def(
      "lip_model",
      [](const Vec& theta, const std::string& basis_kind,
         const RegressorSpec& spec) {
        return Model::from_lip(LipParams{theta}, basis_kind, spec);
      },
      py::arg("theta"), py::arg("basis_kind"), py::arg("spec"));
  m.def(
      "pgnn_model",
      [](const PGNNParams& params, const Vec& input_scaling,
         const std::string& basis_kind, const RegressorSpec& spec,
         bool nn_only) {
        return Model::from_pgnn(params, input_scaling, basis_kind, spec,
                                nn_only);
      },
      py::arg("params"), py::arg("input_scaling"), py::arg("basis_kind"),
      py::arg("spec"), py::arg("nn_only") = false);
  m.def("save_model", [](const std::filesystem::path& p, const Model& m_) {
    write_model_json(p, m_);
  });
  m.def("load_model", &read_model_json, py::arg("path"));

  m.def("generate_ff", &generate_ff, py::arg("model"), py::arg("basis"),
        py::arg("spec"), py::arg("reference"));
  m.def("run_tracking_experiment", &run_tracking_experiment, py::arg("model"),
        py::arg("reference"), py::arg("plant"),
        py::call_guard<py::gil_scoped_release>());
}
