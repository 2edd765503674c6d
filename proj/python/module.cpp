#include "gkpinn/evaluation.hpp"
#include "gkpinn/fdref.hpp"
#include "gkpinn/layers.hpp"
#include "gkpinn/mlp.hpp"
#include "gkpinn/problems.hpp"
#include "gkpinn/runner.hpp"
#include "gkpinn/sampling.hpp"
#include "gkpinn/training.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace gkpinn;

PYBIND11_MODULE(_gkpinn, m) {
  m.doc() = "Singularly perturbed convection-diffusion solvers: PINN and GKPINN";

  py::enum_<Activation>(m, "Activation")
      .value("Sigmoid", Activation::Sigmoid)
      .value("Tanh", Activation::Tanh);
  py::enum_<Kind>(m, "Kind")
      .value("Steady1D", Kind::Steady1D)
      .value("Steady2D", Kind::Steady2D)
      .value("Time1D", Kind::Time1D);
  py::enum_<ModelMode>(m, "ModelMode")
      .value("PINN", ModelMode::PINN)
      .value("GKPINN", ModelMode::GKPINN);
  py::enum_<LayerAxis>(m, "LayerAxis").value("X", LayerAxis::X).value("Y", LayerAxis::Y);
  py::enum_<LayerSide>(m, "LayerSide")
      .value("Left", LayerSide::Left)
      .value("Right", LayerSide::Right);
  py::enum_<RbaForm>(m, "RbaForm")
      .value("SquaredProduct", RbaForm::SquaredProduct)
      .value("WeightedSquare", RbaForm::WeightedSquare);
  py::enum_<ErrorNorm>(m, "ErrorNorm")
      .value("Paper", ErrorNorm::Paper)
      .value("Exact", ErrorNorm::Exact);
  py::enum_<ReferenceKind>(m, "ReferenceKind")
      .value("Auto", ReferenceKind::Auto)
      .value("Analytic", ReferenceKind::Analytic)
      .value("FD", ReferenceKind::FD)
      .value("None_", ReferenceKind::None);

  py::class_<FieldJet>(m, "FieldJet")
      .def(py::init<>())
      .def_readwrite("value", &FieldJet::value)
      .def_readwrite("grad", &FieldJet::grad)
      .def_readwrite("diag_hess", &FieldJet::diag_hess)
      .def("__repr__", [](const FieldJet& j) {
        std::ostringstream os;
        os << "FieldJet(value=" << j.value << ", grad=[" << j.grad[0] << "," << j.grad[1]
           << "], diag_hess=[" << j.diag_hess[0] << "," << j.diag_hess[1] << "])";
        return os.str();
      });

  py::class_<MlpParams>(m, "MlpParams")
      .def_readonly("layer_sizes", &MlpParams::layer_sizes)
      .def_readwrite("weights", &MlpParams::weights)
      .def_readwrite("biases", &MlpParams::biases)
      .def_readonly("activation", &MlpParams::activation);

  m.def("init_mlp", &init_mlp, py::arg("layer_sizes"), py::arg("activation"),
        py::arg("seed"));
  m.def("eval_jet", &eval_jet, py::arg("params"), py::arg("x"));

  py::class_<PerturbedProblem>(m, "PerturbedProblem")
      .def_readonly("kind", &PerturbedProblem::kind)
      .def_readonly("epsilon", &PerturbedProblem::epsilon)
      .def_readonly("diffusion_sign", &PerturbedProblem::diffusion_sign)
      .def("dim", &PerturbedProblem::dim)
      .def("has_analytic", &PerturbedProblem::has_analytic)
      .def("b", [](const PerturbedProblem& p, const Point& x) { return p.b(x); })
      .def("c", [](const PerturbedProblem& p, const Point& x) { return p.c(x); })
      .def("f", [](const PerturbedProblem& p, const Point& x) { return p.f(x); })
      .def("boundary",
           [](const PerturbedProblem& p, const Point& x) { return p.boundary(x); })
      .def("initial", [](const PerturbedProblem& p, const Point& x) { return p.initial(x); })
      .def("analytic",
           [](const PerturbedProblem& p, const Point& x) { return p.analytic(x); });

  m.def("builtin_examples", &builtin_examples, py::arg("epsilon"));
  m.def("builtin_example", &builtin_example, py::arg("index"), py::arg("epsilon"));
  m.def("analytic_on_grid", &analytic_on_grid, py::arg("problem"), py::arg("points"));
  m.def(
      "residual",
      [](const PerturbedProblem& problem, const FieldEvaluator& field, const Point& x) {
        return residual(problem, field, x);
      },
      py::arg("problem"), py::arg("field"), py::arg("x"));

  py::class_<BoundaryLayerSpec>(m, "BoundaryLayerSpec")
      .def(py::init<>())
      .def_readwrite("axis", &BoundaryLayerSpec::axis)
      .def_readwrite("side", &BoundaryLayerSpec::side)
      .def_readwrite("coeff", &BoundaryLayerSpec::coeff);

  py::class_<ExponentialFactor>(m, "ExponentialFactor")
      .def_readonly("spec", &ExponentialFactor::spec)
      .def_readonly("epsilon", &ExponentialFactor::epsilon)
      .def("alpha", &ExponentialFactor::alpha)
      .def("value", &ExponentialFactor::value)
      .def("eval", [](const ExponentialFactor& f, const Point& x) {
        double e, de, d2e;
        f.eval(x, e, de, d2e);
        return py::make_tuple(e, de, d2e);
      });

  py::class_<CompositeModel>(m, "CompositeModel")
      .def_readwrite("smooth", &CompositeModel::smooth)
      .def_readonly("layer_terms", &CompositeModel::layer_terms)
      .def("num_layer_terms",
           [](const CompositeModel& mdl) { return mdl.layer_terms.size(); });

  m.def("infer_layers", &infer_layers, py::arg("problem"));
  m.def("build_factor", &build_factor, py::arg("spec"), py::arg("epsilon"));
  m.def("composite_jet", &composite_jet, py::arg("model"), py::arg("x"));
  m.def("build_model", &build_model, py::arg("problem"), py::arg("hidden_sizes"),
        py::arg("activation"), py::arg("seed"), py::arg("mode"));
  m.def("composite_values", &composite_values, py::arg("model"), py::arg("points"));

  py::class_<PointSets>(m, "PointSets")
      .def(py::init<>())
      .def_readwrite("interior", &PointSets::interior)
      .def_readwrite("boundary", &PointSets::boundary)
      .def_readwrite("boundary_face", &PointSets::boundary_face)
      .def_readwrite("initial", &PointSets::initial)
      .def_readwrite("test", &PointSets::test);

  m.def("latin_hypercube", &latin_hypercube, py::arg("n"), py::arg("dim"), py::arg("seed"));
  m.def("sample_problem_points", &sample_problem_points, py::arg("problem"),
        py::arg("n_interior"), py::arg("n_boundary"), py::arg("n_initial"), py::arg("seed"));
  m.def("test_grid", &test_grid, py::arg("problem"), py::arg("n"));

  py::class_<RbaWeights>(m, "RbaWeights")
      .def(py::init<>())
      .def_readwrite("lambda_", &RbaWeights::lambda)
      .def_readwrite("eta_star", &RbaWeights::eta_star);
  m.def("rba_update", &rba_update, py::arg("weights"), py::arg("residuals"));

  py::class_<AdamParams>(m, "AdamParams")
      .def(py::init<>())
      .def_readwrite("lr", &AdamParams::lr)
      .def_readwrite("beta1", &AdamParams::beta1)
      .def_readwrite("beta2", &AdamParams::beta2)
      .def_readwrite("eps_hat", &AdamParams::eps_hat);

  py::class_<LossBreakdown>(m, "LossBreakdown")
      .def_readonly("ic", &LossBreakdown::ic)
      .def_readonly("bc", &LossBreakdown::bc)
      .def_readonly("r", &LossBreakdown::r)
      .def_readonly("total", &LossBreakdown::total);

  py::class_<LossTerms>(m, "LossTerms")
      .def_readonly("loss", &LossTerms::loss)
      .def_readonly("residuals", &LossTerms::residuals);

  m.def(
      "assemble_loss",
      [](const FieldEvaluator& field, const PerturbedProblem& problem,
         const PointSets& points, const std::optional<RbaWeights>& rba, RbaForm form) {
        return assemble_loss(field, problem, points, rba, form);
      },
      py::arg("field"), py::arg("problem"), py::arg("points"),
      py::arg("rba") = std::nullopt, py::arg("form") = RbaForm::SquaredProduct);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("iterations", &TrainConfig::iterations)
      .def_readwrite("adam", &TrainConfig::adam)
      .def_readwrite("rba_enabled", &TrainConfig::rba_enabled)
      .def_readwrite("eta_star", &TrainConfig::eta_star)
      .def_readwrite("rba_form", &TrainConfig::rba_form)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("history_stride", &TrainConfig::history_stride)
      .def_readwrite("workers", &TrainConfig::workers);

  py::class_<HistoryRow>(m, "HistoryRow")
      .def_readonly("iter", &HistoryRow::iter)
      .def_readonly("loss", &HistoryRow::loss);

  m.def(
      "train",
      [](CompositeModel& model, const PerturbedProblem& problem, const PointSets& points,
         const TrainConfig& config) { return train(model, problem, points, config); },
      py::arg("model"), py::arg("problem"), py::arg("points"), py::arg("config"),
      py::call_guard<py::gil_scoped_release>());

  py::class_<ShishkinMesh1D>(m, "ShishkinMesh1D")
      .def_readonly("nodes", &ShishkinMesh1D::nodes)
      .def_readonly("tau", &ShishkinMesh1D::tau)
      .def_readonly("side", &ShishkinMesh1D::side);
  m.def("shishkin_mesh", &shishkin_mesh, py::arg("n_cells"), py::arg("epsilon"),
        py::arg("layer") = std::nullopt);

  py::class_<ReferenceSolution>(m, "ReferenceSolution")
      .def_readonly("kind", &ReferenceSolution::kind)
      .def_readonly("epsilon", &ReferenceSolution::epsilon)
      .def_readonly("xs", &ReferenceSolution::xs)
      .def_readonly("ys", &ReferenceSolution::ys)
      .def_readonly("values", &ReferenceSolution::values)
      .def("interpolate", &ReferenceSolution::interpolate)
      .def("save_file", &ReferenceSolution::save_file)
      .def_static("load_file", &ReferenceSolution::load_file);

  py::class_<SorOptions>(m, "SorOptions")
      .def(py::init<>())
      .def_readwrite("omega", &SorOptions::omega)
      .def_readwrite("tol", &SorOptions::tol)
      .def_readwrite("max_iter", &SorOptions::max_iter);

  m.def("solve_1d", &solve_1d, py::arg("problem"), py::arg("n_cells"),
        py::call_guard<py::gil_scoped_release>());
  m.def("solve_2d", &solve_2d, py::arg("problem"), py::arg("n_cells"),
        py::arg("sor") = SorOptions{}, py::call_guard<py::gil_scoped_release>());
  m.def("solve_time", &solve_time, py::arg("problem"), py::arg("nx_cells"),
        py::arg("nt_steps"), py::call_guard<py::gil_scoped_release>());

  m.def("l2_relative_error", &l2_relative_error, py::arg("pred"), py::arg("ref"),
        py::arg("norm") = ErrorNorm::Paper);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("defaults_for", &ExperimentConfig::defaults_for)
      .def_readwrite("example", &ExperimentConfig::example)
      .def_readwrite("problem_file", &ExperimentConfig::problem_file)
      .def_readwrite("mode", &ExperimentConfig::mode)
      .def_readwrite("epsilon", &ExperimentConfig::epsilon)
      .def_readwrite("iterations", &ExperimentConfig::iterations)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("n_interior", &ExperimentConfig::n_interior)
      .def_readwrite("n_boundary", &ExperimentConfig::n_boundary)
      .def_readwrite("n_initial", &ExperimentConfig::n_initial)
      .def_readwrite("n_test", &ExperimentConfig::n_test)
      .def_readwrite("hidden", &ExperimentConfig::hidden)
      .def_readwrite("activation", &ExperimentConfig::activation)
      .def_readwrite("adam", &ExperimentConfig::adam)
      .def_readwrite("rba_enabled", &ExperimentConfig::rba_enabled)
      .def_readwrite("eta_star", &ExperimentConfig::eta_star)
      .def_readwrite("rba_form", &ExperimentConfig::rba_form)
      .def_readwrite("reference", &ExperimentConfig::reference)
      .def_readwrite("fd_n", &ExperimentConfig::fd_n)
      .def_readwrite("norm", &ExperimentConfig::norm)
      .def_readwrite("history_stride", &ExperimentConfig::history_stride)
      .def_readwrite("eval_stride", &ExperimentConfig::eval_stride)
      .def_readwrite("workers", &ExperimentConfig::workers)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("example", &RunReport::example)
      .def_readonly("mode", &RunReport::mode)
      .def_readonly("epsilon", &RunReport::epsilon)
      .def_readonly("final_loss", &RunReport::final_loss)
      .def_readonly("l2_test", &RunReport::l2_test)
      .def_readonly("wall_time_seconds", &RunReport::wall_time_seconds)
      .def_readonly("config_echo", &RunReport::config_echo)
      .def_readonly("history_file", &RunReport::history_file);

  m.def("run_experiment", &run_experiment, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
}
