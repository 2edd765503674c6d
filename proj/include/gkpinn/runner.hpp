#pragma once

#include "gkpinn/config.hpp"
#include "gkpinn/evaluation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gkpinn {

/// Runs the full pipeline (sample, build model, train, reference, evaluate,
/// export) and writes history.csv, report.txt, and solution.csv into
/// config.out_dir. FD references are cached on disk and reused.
RunReport run_experiment(const ExperimentConfig& config);

/// Name of the on-disk FD reference cache inside an out_dir.
std::string fd_cache_filename(int example, double epsilon, int fd_n);

/// One row of a Table-I style summary.
struct MatrixCell {
  int example = 0;
  ModelMode mode = ModelMode::PINN;
  double epsilon = 0.0;
  std::optional<RunReport> report;  // empty on failure
  std::string error;
};

/// Runs every (example, mode, epsilon) combination, writing matrix.csv under
/// template_config.out_dir. Kind-dependent fields (point counts, activation)
/// follow the per-example defaults; budget/optimizer fields come from the
/// template. Individual failures are recorded in-row and the matrix
/// continues. An L2 cell without a usable reference is printed as "x".
std::vector<MatrixCell> run_matrix(const ExperimentConfig& template_config,
                                   const std::vector<int>& examples,
                                   const std::vector<ModelMode>& modes,
                                   const std::vector<double>& epsilons);

}  // namespace gkpinn
