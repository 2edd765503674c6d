#pragma once

#include "gkpinn/evaluation.hpp"
#include "gkpinn/problems.hpp"
#include "gkpinn/training.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gkpinn {

enum class ReferenceKind { Auto, Analytic, FD, None };

/// One experiment, fully specified. Defaults reproduce the source protocol:
/// hidden [100,100]; Sigmoid for 1D, Tanh for 2D/time; 1000 interior + 50
/// boundary points for 1D, 10000 interior + 100 boundary + 100 initial for
/// 2D/time; Adam lr 0.001; RBA on with weights initialized to 1 and
/// eta* = 0.0001; 400 test points.
struct ExperimentConfig {
  int example = 1;               // 1..8; ignored when problem_file is set
  std::string problem_file;      // optional custom problem definition
  ModelMode mode = ModelMode::GKPINN;
  double epsilon = 1e-3;
  std::int64_t iterations = 50000;
  std::uint64_t seed = 0;
  int n_interior = 1000;
  int n_boundary = 50;
  int n_initial = 0;
  int n_test = 400;
  std::vector<int> hidden = {100, 100};
  Activation activation = Activation::Sigmoid;
  AdamParams adam;
  bool rba_enabled = true;
  double eta_star = 1e-4;
  RbaForm rba_form = RbaForm::SquaredProduct;
  ReferenceKind reference = ReferenceKind::Auto;
  int fd_n = 0;                  // 0: kind-dependent default (2048 / 256 / 512)
  ErrorNorm norm = ErrorNorm::Paper;
  std::int64_t history_stride = 100;
  std::int64_t eval_stride = 0;  // 0: L2 only on the final history row
  int workers = 1;
  std::string out_dir = "out";

  /// Counts/activation defaults depend on the problem kind.
  static ExperimentConfig defaults_for(Kind kind);

  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Plain `key = value` document (# comments, blank lines ignored).
std::map<std::string, std::string> parse_kv_file(const std::string& path);
std::map<std::string, std::string> parse_kv_text(const std::string& text);

/// Apply recognized keys onto the config; throws on unknown keys or
/// malformed values, naming the offending field.
void apply_config_kv(ExperimentConfig& config,
                     const std::map<std::string, std::string>& kv);

/// Build a problem from a key = value definition file. Coefficients and
/// data are expressions in x, y/t, and eps (see Expr). Required keys depend
/// on `kind`; `epsilon` comes from the config, not the file.
PerturbedProblem load_problem_file(const std::string& path, double epsilon);

const char* to_string(ModelMode mode);
const char* to_string(ReferenceKind ref);
const char* to_string(Activation act);
const char* to_string(ErrorNorm norm);
const char* to_string(RbaForm form);

}  // namespace gkpinn
