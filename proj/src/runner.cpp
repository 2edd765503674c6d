#include "gkpinn/runner.hpp"

#include "gkpinn/sampling.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace gkpinn {

namespace {

namespace fs = std::filesystem;

int default_fd_n(Kind kind) {
  switch (kind) {
    case Kind::Steady1D: return 2048;
    case Kind::Steady2D: return 256;
    case Kind::Time1D: return 512;
  }
  return 0;
}

// FD references are only meaningful while the fitted mesh can represent the
// layer width; far below this the transition point degenerates in double
// precision and the source tables mark the cells "x".
constexpr double kFdEpsilonFloor = 1e-6;

}  // namespace

std::string fd_cache_filename(int example, double epsilon, int fd_n) {
  std::ostringstream os;
  os << "fd_ref_ex" << example << "_eps" << epsilon << "_n" << fd_n << ".csv";
  return os.str();
}

namespace {

struct ResolvedReference {
  Reference ref;  // points into `problem` or `fd`
  std::optional<ReferenceSolution> fd;
};

ResolvedReference resolve_reference(const ExperimentConfig& config,
                                    const PerturbedProblem& problem) {
  ReferenceKind kind = config.reference;
  if (kind == ReferenceKind::Auto) {
    if (problem.has_analytic()) kind = ReferenceKind::Analytic;
    else if (config.epsilon >= kFdEpsilonFloor) kind = ReferenceKind::FD;
    else kind = ReferenceKind::None;
  }
  ResolvedReference out;
  switch (kind) {
    case ReferenceKind::None:
      out.ref = std::monostate{};
      break;
    case ReferenceKind::Analytic:
      if (!problem.has_analytic())
        throw std::invalid_argument("reference=analytic but the problem has no closed form");
      out.ref = &problem;
      break;
    case ReferenceKind::FD: {
      const int fd_n = config.fd_n > 0 ? config.fd_n : default_fd_n(problem.kind);
      const fs::path cache =
          fs::path(config.out_dir) / fd_cache_filename(config.example, config.epsilon, fd_n);
      if (fs::exists(cache)) {
        out.fd = ReferenceSolution::load_file(cache.string());
      } else {
        switch (problem.kind) {
          case Kind::Steady1D: out.fd = solve_1d(problem, fd_n); break;
          case Kind::Steady2D: out.fd = solve_2d(problem, fd_n); break;
          case Kind::Time1D: out.fd = solve_time(problem, fd_n, fd_n); break;
        }
        out.fd->save_file(cache.string());
      }
      break;
    }
    case ReferenceKind::Auto: break;  // unreachable
  }
  return out;
}

PerturbedProblem build_problem(const ExperimentConfig& config) {
  if (!config.problem_file.empty())
    return load_problem_file(config.problem_file, config.epsilon);
  return builtin_example(config.example, config.epsilon);
}

void write_history_csv(const std::string& path, const TrainHistory& history,
                       const std::vector<std::pair<std::int64_t, double>>& l2_checkpoints) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  os << "iter,loss_ic,loss_bc,loss_r,loss_total,l2_test\n";
  std::size_t next_l2 = 0;
  for (const auto& row : history) {
    os << row.iter << "," << row.loss.ic << "," << row.loss.bc << "," << row.loss.r << ","
       << row.loss.total << ",";
    while (next_l2 < l2_checkpoints.size() && l2_checkpoints[next_l2].first < row.iter)
      ++next_l2;
    if (next_l2 < l2_checkpoints.size() && l2_checkpoints[next_l2].first == row.iter)
      os << l2_checkpoints[next_l2].second;
    os << "\n";
  }
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  const PerturbedProblem problem = build_problem(config);
  fs::create_directories(config.out_dir);

  PointSets points = sample_problem_points(problem, config.n_interior, config.n_boundary,
                                           problem.kind == Kind::Time1D ? config.n_initial : 0,
                                           config.seed);
  points.test = test_grid(problem, config.n_test);

  CompositeModel model =
      build_model(problem, config.hidden, config.activation, config.seed, config.mode);

  const ResolvedReference resolved = resolve_reference(config, problem);
  const Reference reference =
      resolved.fd.has_value() ? Reference(&*resolved.fd) : resolved.ref;

  std::optional<RowVector> ref_values;
  if (!std::holds_alternative<std::monostate>(reference)) {
    if (resolved.fd.has_value()) ref_values = resolved.fd->interpolate(points.test);
    else ref_values = analytic_on_grid(problem, points.test);
  }

  TrainConfig tc;
  tc.iterations = config.iterations;
  tc.adam = config.adam;
  tc.rba_enabled = config.rba_enabled;
  tc.eta_star = config.eta_star;
  tc.rba_form = config.rba_form;
  tc.seed = config.seed;
  tc.history_stride = config.history_stride;
  tc.workers = config.workers;

  std::vector<std::pair<std::int64_t, double>> l2_checkpoints;
  TrainCallback callback;
  if (ref_values.has_value()) {
    callback = [&](std::int64_t iter, const CompositeModel& m) {
      const RowVector pred = composite_values(m, points.test);
      l2_checkpoints.emplace_back(iter, l2_relative_error(pred, *ref_values, config.norm));
    };
  }

  const auto t0 = std::chrono::steady_clock::now();
  const TrainHistory history =
      train(model, problem, points, tc, config.eval_stride, callback);
  const auto t1 = std::chrono::steady_clock::now();

  RunReport report = evaluate_run(model, problem, reference, points.test, config.norm);
  report.example = config.problem_file.empty() ? std::to_string(config.example)
                                               : config.problem_file;
  report.mode = to_string(config.mode);
  report.final_loss = history.back().loss;
  report.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.config_echo = config.echo();
  report.history_file = "history.csv";

  write_history_csv((fs::path(config.out_dir) / "history.csv").string(), history,
                    l2_checkpoints);
  {
    std::ofstream os(fs::path(config.out_dir) / "report.txt");
    report.serialize(os);
  }
  {
    std::ofstream os(fs::path(config.out_dir) / "solution.csv");
    const int resolution = problem.dim() == 1 ? 401 : 101;
    export_solution_grid(model, problem, resolution, reference, os);
  }
  return report;
}

std::vector<MatrixCell> run_matrix(const ExperimentConfig& template_config,
                                   const std::vector<int>& examples,
                                   const std::vector<ModelMode>& modes,
                                   const std::vector<double>& epsilons) {
  fs::create_directories(template_config.out_dir);
  std::vector<MatrixCell> cells;
  for (const int example : examples) {
    for (const ModelMode mode : modes) {
      for (const double eps : epsilons) {
        MatrixCell cell;
        cell.example = example;
        cell.mode = mode;
        cell.epsilon = eps;
        try {
          const Kind kind = builtin_example(example, eps).kind;
          ExperimentConfig cfg = ExperimentConfig::defaults_for(kind);
          cfg.example = example;
          cfg.mode = mode;
          cfg.epsilon = eps;
          cfg.iterations = template_config.iterations;
          cfg.seed = template_config.seed;
          cfg.hidden = template_config.hidden;
          cfg.adam = template_config.adam;
          cfg.rba_enabled = template_config.rba_enabled;
          cfg.eta_star = template_config.eta_star;
          cfg.rba_form = template_config.rba_form;
          cfg.reference = template_config.reference;
          cfg.fd_n = template_config.fd_n;
          cfg.norm = template_config.norm;
          cfg.n_test = template_config.n_test;
          cfg.history_stride = template_config.history_stride;
          cfg.eval_stride = template_config.eval_stride;
          cfg.workers = template_config.workers;
          std::ostringstream dir;
          dir << "ex" << example << "_" << to_string(mode) << "_eps" << eps;
          cfg.out_dir = (fs::path(template_config.out_dir) / dir.str()).string();
          cell.report = run_experiment(cfg);
        } catch (const std::exception& err) {
          cell.error = err.what();
        }
        cells.push_back(std::move(cell));
      }
    }
  }

  std::ofstream os(fs::path(template_config.out_dir) / "matrix.csv");
  os.precision(17);
  os << "example,mode,epsilon,loss,l2\n";
  for (const auto& cell : cells) {
    os << cell.example << "," << to_string(cell.mode) << "," << cell.epsilon << ",";
    if (cell.report.has_value()) {
      os << cell.report->final_loss.total << ",";
      if (cell.report->l2_test.has_value()) os << *cell.report->l2_test;
      else os << "x";
    } else {
      os << "error: " << cell.error << ",x";
    }
    os << "\n";
  }
  return cells;
}

}  // namespace gkpinn
